use adiabatic_core::config::parse_config;
use adiabatic_core::sweep::{read_csv, run_sweep, write_csv, write_csv_file, RowStatus, COLUMNS};
use approx::assert_relative_eq;

fn csv_bytes(text: &str) -> Vec<u8> {
    let rows = run_sweep(&parse_config(text).unwrap()).unwrap();
    let mut out = Vec::new();
    write_csv(&rows, &mut out).unwrap();
    out
}

#[test]
fn zero_potential_rows_have_no_deviation() {
    let cfg = parse_config(
        r#"
        dim = 16
        hi_kind = "hopping"
        potential = "polynomial"
        coefficients = [0.0]
        T = [1.0, 5.0]
        dt = 0.05
        "#,
    )
    .unwrap();
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        let m = r.metrics.unwrap();
        assert_eq!(r.status, RowStatus::Ok);
        assert_eq!(m.bound, 0.0);
        assert!(m.deviation <= 1e-9, "deviation {}", m.deviation);
    }
}

#[test]
fn diagonal_kind_success_is_initial_overlap() {
    let cfg = parse_config(
        r#"
        dim = 12
        hi_kind = "diagonal"
        x_min = [0, 3, 11]
        T = [4.0]
        dt = 0.05
        "#,
    )
    .unwrap();
    let rows = run_sweep(&cfg).unwrap();
    let expected = [1.0, 0.0, 0.0];
    for (r, want) in rows.iter().zip(expected) {
        let m = r.metrics.as_ref().unwrap();
        assert!((m.success_probability - want).abs() < 1e-12, "x_min {}", r.x_min);
        assert_eq!((m.classical_x_star, m.classical_value), (r.x_min, -1.0));
    }
}

#[test]
fn identical_configs_give_identical_csv() {
    let text = r#"
        dim = 16
        hi_kind = "random"
        seed = 5
        x_min = [2, 9, 14]
        T = [1.0, 3.0]
        dt = 0.05
    "#;
    let first = csv_bytes(text);
    assert_eq!(first, csv_bytes(text));
    assert_eq!(first, csv_bytes(&format!("{text}\nworkers = 3\n")));
    let header = String::from_utf8(first.clone()).unwrap();
    assert_eq!(header.lines().next().unwrap(), COLUMNS.join(","));
    let parsed = read_csv(first.as_slice()).unwrap();
    assert_eq!(parsed.len(), 6);
}

#[test]
fn csv_file_round_trip() {
    let cfg = parse_config("dim = 8\nhi_kind = \"coherent-like\"\nx_min = [4]\nT = [2.0]\n").unwrap();
    let rows = run_sweep(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    write_csv_file(&rows, &path).unwrap();
    let back = read_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back, rows);
}

#[test]
fn hopping_dim512_fixture() {
    let cfg = parse_config(
        r#"
        dim = 512
        hi_kind = "hopping"
        kappa = 1.0
        x_min = [8, 64, 448]
        T = [50.0]
        dt = 0.1
        stride = 50
        "#,
    )
    .unwrap();
    let rows = run_sweep(&cfg).unwrap();
    let archived = [1.478_816_817_122_602_5e-4, 7.390_820_889_265_095e-3, 7.176_846_568_423_345e-3];
    for (r, want) in rows.iter().zip(archived) {
        let m = r.metrics.as_ref().unwrap();
        assert_eq!(r.status, RowStatus::Ok);
        assert_relative_eq!(m.success_probability, want, max_relative = 1e-8);
        assert!(m.deviation <= m.bound);
        assert!(m.tail_mass_final < 1e-6);
        assert!(m.norm_drift <= 1e-9);
    }
    // the rows are not monotone in x_min: the wall suppresses both ends
    assert!(rows[0].metrics.as_ref().unwrap().success_probability < rows[2].metrics.as_ref().unwrap().success_probability);
}
