use std::process::Command;

fn betatile(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_betatile")).args(args).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn analyze_golden() {
    let (code, out, _) = betatile(&["analyze", "--coeffs", "1,-3,1"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["kneading"]["digits"], "2(1)");
    assert_eq!(v["substitution"]["words"], "1->121; 2->21");
    assert_eq!(v["matrix"], json("[[2,1],[1,1]]"));
    let (_, by_poly, _) = betatile(&["analyze", "--poly", "x^2 - 3x + 1"]);
    assert_eq!(by_poly, out);
}

#[test]
fn spectrum_tribonacci() {
    let (code, out, _) = betatile(&["spectrum", "--coeffs", "-1,-1,-1,1", "--grid", "32", "--budget", "40"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["verdict"], "Certified");
    let (code, out, _) = betatile(&["spectrum", "--coeffs", "1,-3,1", "--grid", "8", "--budget", "0"]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["verdict"], "Inconclusive");
}

#[test]
fn not_pisot_is_a_usage_error() {
    let (code, out, err) = betatile(&["analyze", "--coeffs", "2,0,1"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("Pisot"), "{err}");
    let (code, _, err) = betatile(&["analyze", "--coeffs", "1,2", "--poly", "x-2"]);
    assert_eq!((code, err.lines().count()), (2, 1));
}

#[test]
fn deterministic_output_and_out_file() {
    let args = ["code", "--coeffs", "1,-3,1", "--samples", "5", "--points", "100", "--seed", "11"];
    let (_, a, _) = betatile(&args);
    let (_, b, _) = betatile(&args);
    assert_eq!(a, b);
    let dir = std::env::temp_dir().join(format!("betatile-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let (code, out, _) = betatile(&["analyze", "--coeffs", "-1,-1,1", "--out", path.to_str().unwrap()]);
    assert_eq!((code, out.as_str()), (0, ""));
    assert_eq!(json(&std::fs::read_to_string(&path).unwrap())["schema_version"], "1");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn numeration_commands() {
    let (code, out, _) = betatile(&["expand", "--coeffs", "-1,-1,1", "--value", "1/3"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["expansion"], "(00101000)");
    let (_, out, _) = betatile(&["fin", "--coeffs", "-1,-1,-1,1", "--value", "1,1"]);
    assert_eq!(json(&out)["finite"], true);
    let (code, out, _) = betatile(&["property-w", "--coeffs", "1,-3,1", "--value", "-2,1", "--lo", "1/2", "--hi", "3/5"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["found"], true);
}

#[test]
fn asymptotic_and_code() {
    let (code, out, _) = betatile(&["asymptotic", "--coeffs", "1,-3,1", "--pair", "T_1^0,T_1"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["verdict"], "Asymptotic");
    let (code, out, _) = betatile(&["asymptotic", "--coeffs", "1,-1,-2,1", "--pair", "T_1,T_2"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["verdict"], "Diverges");
    let (code, _, err) = betatile(&["asymptotic", "--coeffs", "1,-3,1", "--pair", "T_1,T_9"]);
    assert_eq!(code, 2, "{err}");

    let (code, out, _) = betatile(&["code", "--coeffs", "-1,-1,-1,1", "--tiling", "T(2|1)", "--value", "2/9"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["agreement"], 0.0);
    let (code, out, _) = betatile(&["code", "--coeffs", "1,-3,1", "--digits", "1.0201", "--levels", "2"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["code"]["levels"].as_array().unwrap().len(), 2);
    let (code, _, _) = betatile(&["code", "--coeffs", "1,-3,1", "--digits", "22.0"]);
    assert_eq!(code, 2);
}

#[test]
fn rauzy_csv() {
    let (code, out, _) = betatile(&["rauzy", "--coeffs", "-1,-1,-1,1", "--points", "50"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r.split(',').count() == 2 && r.split(',').all(|x| x.parse::<f64>().is_ok())));
    let (_, out, _) = betatile(&["rauzy", "--coeffs", "-1,-1,-1,1", "--points", "0"]);
    assert!(out.is_empty());
}

#[test]
fn help_lists_subcommands() {
    let (code, out, _) = betatile(&["--help"]);
    assert_eq!(code, 0);
    for c in ["analyze", "expand", "fin", "property-w", "spectrum", "asymptotic", "code", "rauzy"] {
        assert!(out.contains(c), "{c}");
    }
}
