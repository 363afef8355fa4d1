// Golden-file manifest shared by the golden and acceptance test targets
// (pulled in with include!). Each entry: (file stem, CLI arguments).

pub fn golden_cases() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("flow_kdv_k1", vec!["flow", "--hierarchy", "kdv", "--k", "1"]),
        ("flow_kdv_k3", vec!["flow", "--hierarchy", "kdv", "--k", "3"]),
        ("flow_kdv_k5", vec!["flow", "--hierarchy", "kdv", "--k", "5"]),
        (
            "flow_kdv_k3_latex",
            vec!["flow", "--hierarchy", "kdv", "--k", "3", "--format", "latex"],
        ),
        (
            "flow_kdv_k3_json",
            vec!["flow", "--hierarchy", "kdv", "--k", "3", "--format", "json"],
        ),
        ("star_p3_u", vec!["star", "--lhs", "p^3", "--rhs", "u"]),
        ("star_u_p3", vec!["star", "--lhs", "u", "--rhs", "p^3"]),
        (
            "star_p2_tail",
            vec!["star", "--lhs", "p^2", "--rhs", "u1 p^-1", "--floor", "-1"],
        ),
        ("bracket_p3_u", vec!["bracket", "--lhs", "p^3", "--rhs", "u"]),
        (
            "plus_part",
            vec!["star", "--lhs", "3/2*u*p + 3/2*k*u_x + p^3", "--rhs", "1"],
        ),
        ("root_kdv_depth7", vec!["root", "--l", "p^2 + u", "--n", "2", "--depth", "7"]),
        ("charge_k1", vec!["charge", "--k", "1"]),
        ("charge_k3", vec!["charge", "--k", "3"]),
        ("charge_k5", vec!["charge", "--k", "5"]),
        ("limit_flow_k3", vec!["limit", "--input", "tests/fixtures/flow_k3.json"]),
        (
            "hirota_soliton_n3",
            vec!["hirota", "--n", "3", "--soliton", "a=2,b=1/3,c=1"],
        ),
        ("dfay_order4", vec!["dfay", "--order", "4"]),
        ("dfay_order4_reparam", vec!["dfay", "--order", "4", "--reparam-p"]),
        ("schur_n0", vec!["schur", "--N", "0"]),
        ("schur_n3", vec!["schur", "--N", "3"]),
        ("qleibniz_n1", vec!["qleibniz", "--n", "1"]),
        ("qleibniz_n2", vec!["qleibniz", "--n", "2"]),
        ("qcomm_x_x2", vec!["qcomm", "--lhs", "x*dq", "--rhs", "x^2*dq"]),
        ("map_sato", vec!["map-sato", "--coeff-file", "tests/fixtures/sato_v.json"]),
        (
            "map_dkp",
            vec!["map-dkp", "--coeff-file", "tests/fixtures/dkp_b.json", "--n", "2"],
        ),
    ]
}

pub fn check_golden(name: &str, args: &[&str]) {
    let mut full = vec!["starlax"];
    full.extend_from_slice(args);
    let got = starlax_cli::run_args(full).unwrap_or_else(|e| panic!("{name}: {e}"));
    let path = format!("tests/golden/{name}.txt");
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    assert_eq!(
        got.trim_end_matches('\n'),
        want.trim_end_matches('\n'),
        "golden mismatch for {name}"
    );
}
