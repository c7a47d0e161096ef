mod common;

use common::{sweep_config, MODERATE_G, WEAK_G};
use qdphonon::sweep::{
    compare_modes, read_rows, read_rows_from, run, run_to, CsvSink, Format, JsonSink, Mode,
    RowSink, RunConfig, ThermalReference,
};

#[test]
fn uncoupled_single_point_is_thermal() {
    let c = sweep_config(0.0, 0.0, 0.0, 1, "modes = [\"secular\"]");
    let r = run(&c).unwrap();
    assert_eq!(r.rows.len(), 1);
    let row = &r.rows[0];
    assert!((row.mean_n.unwrap() - 1.0).abs() < 1e-9, "{row:?}");
    assert!((row.g2.unwrap() - 2.0).abs() < 1e-8, "{row:?}");
}

#[test]
fn three_points_two_modes_give_six_ordered_rows() {
    let r = run(&sweep_config(MODERATE_G, -1.0, 1.0, 3, "")).unwrap();
    let keys: Vec<(f64, Mode)> = r
        .rows
        .iter()
        .map(|row| (row.sweep_value, row.mode))
        .collect();
    assert_eq!(
        keys,
        vec![
            (-1.0, Mode::Secular),
            (-1.0, Mode::BeyondSecular),
            (0.0, Mode::Secular),
            (0.0, Mode::BeyondSecular),
            (1.0, Mode::Secular),
            (1.0, Mode::BeyondSecular),
        ]
    );
}

#[test]
fn small_coupling_cooling_sweep_moves_the_minimum() {
    let r = run(&sweep_config(WEAK_G, 0.0, 3.0, 121, "")).unwrap();
    let report = compare_modes(&r.rows, ThermalReference::Constant(1.0)).unwrap();
    assert!(report.secular.min_mean_n < 1.0);
    assert!(report.beyond_secular.min_mean_n < 1.0);
    assert_ne!(
        report.secular.argmin, report.beyond_secular.argmin,
        "minima at the same grid point:\n{report}"
    );
}

#[test]
fn negligible_correction_gives_no_shift() {
    // At this coupling the cooling signal itself is at rounding level, so
    // the modes are compared on identical columns.
    let g = 1e-8;
    let d = qdphonon::dress(&common::fixture(1.0, g), false).unwrap();
    assert!(d.delta_bar.abs() < 1e-15 && d.beta < 1e-15);
    let r = run(&sweep_config(g, 0.0, 3.0, 31, "")).unwrap();
    let report = compare_modes(&r.rows, ThermalReference::Constant(1.0)).unwrap();
    assert!(report.max_abs_diff < 1e-14, "{}", report.max_abs_diff);

    let mut rows: Vec<_> = r.rows_for(Mode::Secular).cloned().collect();
    let copies: Vec<_> = rows
        .iter()
        .map(|row| qdphonon::sweep::SweepRow {
            mode: Mode::BeyondSecular,
            ..row.clone()
        })
        .collect();
    rows.extend(copies);
    let report = compare_modes(&rows, ThermalReference::Constant(1.0)).unwrap();
    assert_eq!(report.argmin_shift, 0.0);
    assert_eq!(report.max_abs_diff, 0.0);
}

#[test]
fn uncoupled_sweep_has_no_cooling_band() {
    let r = run(&sweep_config(0.0, -3.0, 3.0, 25, "")).unwrap();
    let report = compare_modes(&r.rows, ThermalReference::Constant(1.0)).unwrap();
    assert_eq!(report.secular.cooling_bandwidth, 0.0);
    assert_eq!(report.beyond_secular.cooling_bandwidth, 0.0);
    assert!(report.secular.max_g2_cooling.is_none());
}

#[test]
fn correction_does_not_narrow_the_cooling_band() {
    let r = run(&sweep_config(MODERATE_G, -3.0, 3.0, 121, "")).unwrap();
    let report = compare_modes(&r.rows, ThermalReference::Constant(1.0)).unwrap();
    assert!(
        report.beyond_secular.cooling_bandwidth >= report.secular.cooling_bandwidth,
        "{} < {}",
        report.beyond_secular.cooling_bandwidth,
        report.secular.cooling_bandwidth
    );
}

#[test]
fn csv_and_json_hold_the_same_rows() {
    let c = sweep_config(MODERATE_G, -1.5, 1.5, 4, "modes = [\"secular\", \"beyond_secular\", \"oracle_dressed\", \"oracle_labframe\"]\noracle_n_max = 8");
    let mut csv = Vec::new();
    let mut json = Vec::new();
    let result = run(&c).unwrap();
    {
        let mut a = CsvSink::new(&mut csv).unwrap();
        let mut b = JsonSink::new(&mut json).unwrap();
        for sink in [&mut a as &mut dyn RowSink, &mut b] {
            sink.write_rows(&result.rows).unwrap();
            sink.finish().unwrap();
        }
    }
    let from_csv = read_rows_from(csv.as_slice(), Format::Csv).unwrap();
    let from_json = read_rows_from(json.as_slice(), Format::Json).unwrap();
    assert_eq!(from_csv, result.rows);
    assert_eq!(from_json, result.rows);
    assert_eq!(result.rows.len(), 16);
}

#[test]
fn files_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for (k, threads) in [0, 0, 1, 3].into_iter().enumerate() {
        let c = sweep_config(MODERATE_G, -3.0, 3.0, 61, &format!("threads = {threads}"));
        let path = dir.path().join(format!("out{k}.json"));
        {
            let mut sink = JsonSink::new(std::io::BufWriter::new(
                std::fs::File::create(&path).unwrap(),
            ))
            .unwrap();
            run_to(&c, Some(&mut sink)).unwrap();
        }
        contents.push(std::fs::read(&path).unwrap());
        assert_eq!(read_rows(&path).unwrap().len(), 122);
    }
    assert!(contents.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn g_and_nbar_axes() {
    let text = "omega_ph = 2.0\ndelta = 1.4\nrabi = 1.0\ng = 0.0\ngamma = 0.05\ngamma_c = 0.01\nkappa = 0.5\n\
                nbar = 1.0\nsweep_axis = \"g\"\nsweep_lo = 0.0\nsweep_hi = 0.3\nsweep_points = 4\n";
    let r = run(&RunConfig::parse(text).unwrap()).unwrap();
    let means: Vec<f64> = r
        .rows_for(Mode::Secular)
        .map(|row| row.mean_n.unwrap())
        .collect();
    assert!((means[0] - 1.0).abs() < 1e-8);
    assert!(
        means.windows(2).all(|w| w[1] < w[0]),
        "cooling deepens with g: {means:?}"
    );

    let text = "omega_ph = 2.0\ndelta = 1.4\nrabi = 1.0\ng = 0.3\ngamma = 0.05\ngamma_c = 0.01\nkappa = 0.5\n\
                nbar = 1.0\nsweep_axis = \"nbar\"\nsweep_lo = 0.5\nsweep_hi = 2.0\nsweep_points = 4\n";
    let r = run(&RunConfig::parse(text).unwrap()).unwrap();
    let report = compare_modes(&r.rows, ThermalReference::SweepValue).unwrap();
    assert!(
        (report.secular.cooling_bandwidth - 1.5).abs() < 1e-12,
        "cools at every n̄:\n{report}"
    );
}
