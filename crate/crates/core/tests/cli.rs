use lampar::cli::main_with;

fn lampar(args: &[&str]) -> (i32, String, String) {
    let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with(&args, &mut out, &mut err, false);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn check_prints_types() {
    assert_eq!(lampar(&["check", "programs/or.lpar"]), (0, "Bool\n".into(), String::new()));
    assert_eq!(lampar(&["check", "programs/fw3.lpar"]).1, "Row\n");
    assert_eq!(lampar(&["check", "programs/pi.lpar"]).1, "Q\n");
}

#[test]
fn nested_binder_is_rejected() {
    let (code, out, err) = lampar(&["check", "programs/nested_nu.lpar"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("1-depth"), "{err}");
    assert!(err.contains("4:3"), "{err}");
}

#[test]
fn parse_errors_point_at_the_source() {
    let dir = std::env::temp_dir().join("lampar-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let f = dir.join("bad.lpar");
    std::fs::write(&f, "var x : Bool;\nif x then tt els ff\n").unwrap();
    let (code, _, err) = lampar(&["check", f.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("2:"), "{err}");
    assert!(err.contains('^'), "{err}");
}

#[test]
fn or_with_substitutions() {
    let (code, out, _) = lampar(&["run", "programs/or.lpar", "--let", "x=ff", "--let", "y=ff"]);
    assert_eq!((code, out.as_str()), (0, "ff\n"));
    let (_, out, _) = lampar(&["run", "programs/or.lpar", "--let", "x=u", "--let", "y=tt"]);
    assert_eq!(out, "tt\n");
    let (code, _, err) = lampar(&["run", "programs/or.lpar", "--let", "z=tt"]);
    assert_eq!(code, 1);
    assert!(err.contains("no free variable z"), "{err}");
}

#[test]
fn fw_trace_matches_golden() {
    let (code, out, _) = lampar(&["run", "programs/fw3.lpar", "--prims", "floyd-warshall", "--trace", "text"]);
    assert_eq!(code, 0);
    assert_eq!(out, include_str!("golden/fw3.trace"));
    assert_eq!(out.lines().last(), Some("I1(3) || I2(3) || I3(3)"));
}

#[test]
fn fw_with_a_matrix() {
    let (code, out, _) = lampar(&["run", "programs/fw3.lpar", "--matrix", "programs/fw3.matrix"]);
    assert_eq!(code, 0);
    assert_eq!(out, "I1(3)[0, 4, 5] || I2(3)[3, 0, 1] || I3(3)[2, 6, 0]\n");
}

#[test]
fn structured_trace_matches_golden() {
    let (code, out, _) = lampar(&["run", "programs/buyer_vendor.lpar", "--trace", "structured"]);
    assert_eq!(code, 0);
    assert_eq!(out, include_str!("golden/buyer_vendor.jsonl"));
}

#[test]
fn pi_profile_is_inferred() {
    let (code, out, _) = lampar(&["run", "programs/pi.lpar", "--let", "l=4"]);
    let want = lampar::prims::pi_oracle(4);
    assert_eq!(code, 0);
    assert_eq!(out, format!("{}/{}\n", want.numer(), want.denom()));
}

#[test]
fn deadlock_and_fuel_exit_codes() {
    let (code, _, err) = lampar(&["run", "programs/deadlock.lpar"]);
    assert_eq!(code, 2);
    assert!(err.contains("receiver 1") && err.contains("receiver 2"), "{err}");
    let (code, _, err) = lampar(&["run", "programs/or.lpar", "--let", "x=ff", "--let", "y=ff", "--fuel", "2"]);
    assert_eq!(code, 3);
    assert!(err.contains("fuel"), "{err}");
    assert_eq!(lampar(&["run", "programs/or.lpar", "--fuel", "0"]).0, 1);
}

#[test]
fn random_strategy_is_reproducible() {
    let args = ["run", "programs/fw3.lpar", "--strategy", "random", "--seed", "5", "--trace", "text"];
    let (code, first, _) = lampar(&args);
    assert_eq!(code, 0);
    assert_eq!(lampar(&args).1, first);
}

#[test]
fn topo2axiom_outputs() {
    let (code, out, err) = lampar(&["topo2axiom", "programs/example4.topo"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.lines().next(),
        Some("(A1 -> A1 /\\ A2 /\\ A4) \\/ (A2 -> A2 /\\ A1) \\/ (A3 -> A3 /\\ A1 /\\ A2) \\/ (A4 -> A4 /\\ Bot)")
    );
    assert!(out.contains("nu a : {1: A1 ~ [2, 4]; 2: A2 ~ [1]; 3: A3 ~ [1, 2]; 4: A4 ~ []}"));
    assert!(err.contains("self-loops"));
    assert_eq!(lampar(&["topo2axiom", "programs/em.topo"]).1.lines().next(), Some("(A1 -> A1 /\\ Bot) \\/ (A2 -> A2 /\\ A1)"));
    let ring = lampar(&["topo2axiom", "programs/ring7.topo"]).1;
    assert!(ring.starts_with("(A1 -> A1 /\\ A7) \\/ (A2 -> A2 /\\ A1)"), "{ring}");
}

#[test]
fn fuzz_subcommand() {
    let (code, out, _) = lampar(&["fuzz", "subject-reduction", "50", "--seed", "7"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("subject-reduction: 50 cases, 0 failures"), "{out}");
    let (code, out, _) = lampar(&["fuzz", "topology", "0", "--exhaustive", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains("69 cases"), "{out}");
    assert_eq!(lampar(&["fuzz", "nonsense", "1"]).0, 1);
}
