use std::process::{Command, Output};

fn treedeck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treedeck"))
        .args(args)
        .env_remove("TREEDECK_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Output without the `#` header lines.
fn body(o: &Output) -> String {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn caterpillar_deck() {
    let o = treedeck(&["deck", "--tree", "(*,(*,(*,(*,*))))", "--j", "4"]);
    assert!(o.status.success());
    assert_eq!(body(&o), "(*,(*,(*,*)))\n");
}

#[test]
fn header_echoes_version_config_and_time() {
    let o = treedeck(&["--threads", "2", "kalmar", "--upto", "3"]);
    let out = stdout(&o);
    let header: Vec<&str> = out.lines().take_while(|l| l.starts_with('#')).collect();
    assert_eq!(header.len(), 3);
    assert!(header[0].starts_with("# treedeck "));
    assert!(header[1].contains("threads=2") && header[1].contains("upto: 3"));
    assert!(header[2].starts_with("# wall_time_ms\t"));
    assert_eq!(body(&o), "n\tfactorizations\tpartial_sum\n1\t1\t1\n2\t1\t2\n3\t1\t3\n");
}

#[test]
fn universal_six() {
    let o = treedeck(&["--format", "plain", "universal", "--k", "6"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("u(6)=9\texhaustive=true"));
    assert_eq!(out.lines().filter(|l| l.starts_with("witness\t")).count(), 6);
}

#[test]
fn table_with_known_bound_for_twelve() {
    let o = treedeck(&["--format", "plain", "table1", "--max-k", "12"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[1], "kalmar\t1\t2\t3\t5\t6\t9\t10\t14\t16\t19\t20\t28");
    assert_eq!(rows[2], "u\t1\t2\t3\t5\t6\t9\t10\t14\t16\t19\t21\t<=28");
}

#[test]
fn table_for_one() {
    let o = treedeck(&["--format", "plain", "table1", "--max-k", "1"]);
    assert_eq!(stdout(&o), "k\t1\nkalmar\t1\nu\t1\n");
}

#[test]
fn exit_codes() {
    assert_eq!(treedeck(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(treedeck(&["deck", "--tree", "(*,", "--j", "1"]).status.code(), Some(2));
    assert_eq!(treedeck(&["counterexample", "--n", "7"]).status.code(), Some(2));
    let o = treedeck(&["reconstruct", "--n", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("293547"));
    assert_eq!(treedeck(&["--ceiling", "10", "enumerate", "--n", "8"]).status.code(), Some(3));
}

#[test]
fn counterexample_for_eight() {
    let o = treedeck(&["--format", "plain", "counterexample", "--n", "8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("family\tn=8\tresidue=0\tk=2\tdeck_size=4\tverified=true\tmultidecks_differ=true\n"));
    assert!(out.ends_with(
        "T1\t((*,(*,(*,*))),((*,*),(*,*)))\n\
         T2\t((*,(*,*)),((*,*),(*,(*,*))))\n\
         S\t((*,(*,*)),(*,(*,(*,*))))\n"
    ));
}

#[test]
fn reconstruct_reports_witness() {
    let o = treedeck(&["--format", "plain", "reconstruct", "--n", "5", "--j", "4"]);
    assert_eq!(
        stdout(&o),
        "determination\tn=5\tj=4\tmode=deck\tdetermined=false\tshapes=3\tdistinct=2\n\
         witness\t(*,((*,*),(*,*)))\t((*,*),(*,(*,*)))\n"
    );
}

#[test]
fn extremal_singleton() {
    let o = treedeck(&["--format", "plain", "extremal", "--n", "8", "--quantity", "singleton"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("achiever")).count(), 3);
}

#[test]
fn multideck_routes_agree() {
    let t = "((*,(*,*)),((*,*),(*,(*,*))))";
    let dp = treedeck(&["multideck", "--tree", t, "--j", "4"]);
    let bf = treedeck(&["multideck", "--tree", t, "--j", "4", "--bruteforce"]);
    assert_eq!(body(&dp), body(&bf));
}

#[test]
fn verify_all_quick_is_thread_independent() {
    let one = treedeck(&["--threads", "1", "verify-all", "--level", "quick"]);
    let four = treedeck(&["--threads", "4", "verify-all", "--level", "quick"]);
    assert_eq!(body(&one), body(&four));
    // The only failing check is the transposed size-6 reference triplet.
    let failing: Vec<String> = body(&one).lines().filter(|l| l.starts_with("FAIL")).map(str::to_string).collect();
    assert_eq!(failing.len(), 1, "{failing:?}");
    assert!(failing[0].starts_with("FAIL\t2\tmultideck-fixtures"));
    assert_eq!(one.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&one.stderr).contains("criterion 2"));
}
