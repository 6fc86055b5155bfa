use mdqed::config::{parse_scenario, Format, ModelKindConfig};
use mdqed::laplace::InverseMethod;
use mdqed::run::{run_scenario, Command, RunOptions};
use mdqed::Error;
use proptest::prelude::*;

const LORENTZ: &str = r#"
[medium]
conductor = false

[[medium.electric]]
kind = "lorentz"
plasma = 1.0
resonance = 1.0
damping = 0.2
correlation_length = 0.3

[[medium.magnetic]]
kind = "anisotropic"
plasma = [0.5, 0.4, 0.3]
resonance = 1.1
damping = [0.3, 0.3, 0.2]

[grids]
omega_max = 5.0
n_omega = 50
k = [[0.0, 0.0, 0.8]]

[numerics]
laplace = "talbot"
"#;

#[test]
fn minimal_vacuum_config_uses_defaults() {
    let cfg = parse_scenario("[medium]\n").unwrap();
    assert!(cfg.medium.electric.is_empty() && cfg.medium.magnetic.is_empty());
    assert_eq!(cfg.grids.omega_q_order, 2048);
    assert_eq!(cfg.grids.kk_points, 4096);
    assert_eq!(cfg.numerics.laplace, InverseMethod::Auto);
    assert_eq!(cfg.output.formats, vec![Format::Csv, Format::Json]);
    assert_eq!(parse_scenario("").unwrap(), cfg);
}

#[test]
fn negative_rtol_names_the_key_and_line() {
    let text = "[medium]\n\n[numerics]\nrtol = -1e-8\n";
    match parse_scenario(text) {
        Err(Error::Validation { key, message }) => {
            assert_eq!(key, "numerics.rtol");
            assert!(message.contains("line 4"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_keys_are_rejected_with_line() {
    let text = "[grids]\nomega_max = 5.0\nomega_mx = 3.0\n";
    match parse_scenario(text) {
        Err(Error::Parse(msg)) => assert!(msg.starts_with("line 3"), "{msg}"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_scenario("[extra]\n"), Err(Error::Parse(_))));
    let bad_model = "[[medium.electric]]\nkind = \"lorentz\"\nplasma = 1.0\nresonance = 1.0\ndamping = 0.1\nwidth = 2\n";
    assert!(matches!(parse_scenario(bad_model), Err(Error::Parse(_))));
}

#[test]
fn model_validation() {
    let missing = "[[medium.electric]]\nkind = \"lorentz\"\nplasma = 1.0\ndamping = 0.1\n";
    assert!(matches!(parse_scenario(missing), Err(Error::Validation { key, .. }) if key == "medium.electric[0].resonance"));
    let magnetic_drude = "[[medium.magnetic]]\nkind = \"drude\"\nplasma = 1.0\ndamping = 0.1\n";
    assert!(matches!(parse_scenario(magnetic_drude), Err(Error::Validation { .. })));
    let zero_k = "[grids]\nk = [[0.0, 0.0, 0.0]]\n";
    assert!(matches!(parse_scenario(zero_k), Err(Error::Validation { key, .. }) if key == "grids.k[0]"));
    let negative_damping = "[[medium.electric]]\nkind = \"drude\"\nplasma = 1.0\ndamping = -0.1\n";
    assert!(matches!(parse_scenario(negative_damping), Err(Error::Validation { .. })));
}

#[test]
fn lorentz_config_round_trips() {
    let cfg = parse_scenario(LORENTZ).unwrap();
    assert_eq!(cfg.medium.electric[0].kind, ModelKindConfig::Lorentz);
    assert_eq!(cfg.numerics.laplace, InverseMethod::Talbot);
    let normal = cfg.to_toml().unwrap();
    let again = parse_scenario(&normal).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(again.to_toml().unwrap(), normal);
}

proptest! {
    #[test]
    fn grids_round_trip(omega_max in 0.1f64..100.0, n in 2usize..500, kz in 0.01f64..5.0, order in 8usize..4096) {
        let text = format!("[grids]\nomega_max = {omega_max:?}\nn_omega = {n}\nk = [[0.0, 0.1, {kz:?}]]\nomega_q_order = {order}\n");
        let cfg = parse_scenario(&text).unwrap();
        let back = parse_scenario(&cfg.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

fn table_csv(non_psd: bool) -> String {
    let mut s = String::from("omega,k");
    for a in ["x", "y", "z"] {
        for b in ["x", "y", "z"] {
            s.push_str(&format!(",{a}{b}_re,{a}{b}_im"));
        }
    }
    s.push('\n');
    for i in 0..=40 {
        let w = 0.1 * i as f64;
        for k in [0.0, 2.0] {
            let v = 0.2 * w * (-w * w).exp();
            let d = [v, v, if non_psd { -v } else { v }];
            let mut row = format!("{w},{k}");
            for r in 0..3 {
                for c in 0..3 {
                    let x = if r == c { d[r] } else { 0.0 };
                    row.push_str(&format!(",{x},0"));
                }
            }
            s.push_str(&row);
            s.push('\n');
        }
    }
    s
}

#[test]
fn non_psd_table_is_a_model_violation() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), table_csv(true)).unwrap();
    let text = "[[medium.electric]]\nkind = \"tabulated\"\ntable = \"bad.csv\"\n\n[grids]\nomega_max = 3.0\nn_omega = 8\nomega_q_order = 64\n";
    std::fs::write(dir.path().join("s.toml"), text).unwrap();
    let cfg = mdqed::config::load_scenario(&dir.path().join("s.toml")).unwrap();
    let out = dir.path().join("out");
    let opts = RunOptions { command: Command::Chi, si: false, out: Some(out.clone()), format: None };
    let m = run_scenario(&cfg, &opts).unwrap();
    assert_eq!(m.exit_code(), 2);
    assert_eq!(m.checks.len(), 1);
    assert_eq!(m.checks[0].error_kind.as_deref(), Some("NotPSD"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["checks"][0]["error_kind"], "NotPSD");
}

#[test]
fn vacuum_run_is_deterministic_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_scenario("[grids]\nomega_max = 4.0\nn_omega = 8\nt_max = 4.0\nn_t = 5\nomega_q_order = 64\nkk_points = 256\n").unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let opts = RunOptions { command: Command::Verify, si: false, out: Some(out.clone()), format: None };
        (run_scenario(&cfg, &opts).unwrap(), out)
    };
    let (m1, o1) = run("a");
    let (m2, o2) = run("b");
    assert!(m1.passed(), "{:?}", m1.checks);
    let names: Vec<&str> = m1.checks.iter().map(|c| c.name.as_str()).collect();
    for name in ["medium", "kk_electric", "fdt_electric", "coupling_round_trip_electric", "modes", "equal_time_commutators", "maxwell_residual"] {
        assert_eq!(names.iter().filter(|n| **n == name).count(), 1, "{name}");
    }
    assert_eq!(m1.artifacts.len(), m2.artifacts.len());
    for name in ["chi_kernel_e_k0.csv", "chi_spectrum_m_k0.csv", "modes_k0.csv", "commutators_k0.csv"] {
        let a = std::fs::read(o1.join(name)).unwrap();
        let b = std::fs::read(o2.join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let chi = std::fs::read_to_string(o1.join("chi_kernel_e_k0.csv")).unwrap();
    for line in chi.lines().skip(1) {
        assert!(line.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0));
    }
    assert!(chi.lines().nth(1).unwrap().contains("0.00000000000000000e0"));
}
