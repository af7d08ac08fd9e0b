//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::{json, Map, Value};

use tdgn::cli::execute;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn cfg(v: Value) -> Map<String, Value> {
    v.as_object().cloned().unwrap_or_default()
}

fn result(command: &str, config: Value) -> Result<Value, String> {
    execute(command, Some(&cfg(config)), Map::new(), None)
        .map(|r| r.outcome.result)
        .map_err(|e| format!("{command}: {e}"))
}

fn num(v: &Value, ptr: &str) -> Result<f64, String> {
    v.pointer(ptr).and_then(Value::as_f64).ok_or_else(|| format!("missing {ptr}"))
}

fn require(ok: bool, what: String) -> Result<String, String> {
    if ok {
        Ok(what)
    } else {
        Err(what)
    }
}

fn within_time(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("{what} took {t:?} > {limit:?}"))
    }
}

fn c1_yang_baxter() -> Check {
    let start = Instant::now();
    let r = result("verify-yb", json!({ "alpha": 1.0, "beta": 2.0, "samples": 100, "seed": 7, "tolerance": 1e-10 }))?;
    within_time(start, Duration::from_secs(10), "Yang–Baxter sweep")?;
    let ids = r["identities"].as_array().ok_or("no identities")?;
    let mut worst: f64 = 0.0;
    for id in ids {
        if id["samples"] != 100 {
            return Err(format!("{} ran {} samples", id["identity_id"], id["samples"]));
        }
        worst = worst.max(num(id, "/residual")?);
    }
    require(ids.len() == 5 && worst <= 1e-10, format!("{} families × 100 samples, max residual {worst:e} ≤ 1e-10", ids.len()))
}

fn c2_transport() -> Check {
    let r = result("verify-transport", json!({ "n_left": 3, "n_right": 3, "samples": 3, "seed": 7 }))?;
    let tr = num(&r, "/transport/residual")?;
    let cm = num(&r, "/commute/residual")?;
    let wi = num(&r, "/witness/residual")?;
    let small = result("verify-transport", json!({ "n_left": 1, "n_right": 3, "samples": 5, "seed": 8 }))?;
    let tr2 = num(&small, "/transport/residual")?.max(num(&small, "/commute/residual")?);
    require(
        tr <= 1e-9 && cm <= 1e-9 && tr2 <= 1e-9 && wi >= 1e-3,
        format!("N = 6 transport {tr:e}, commutation {cm:e}; N = 4 {tr2:e} (≤ 1e-9); witness {wi:e} ≥ 1e-3"),
    )
}

fn c3_bethe_oracle() -> Check {
    let start = Instant::now();
    let r = result("verify-eigen", json!({ "n_left": 2, "n_right": 2, "g": 0.6 }))?;
    within_time(start, Duration::from_secs(30), "oracle")?;
    let states = r["states"].as_array().ok_or("no states")?;
    let eig = num(&r, "/max_eigen_residual")?;
    let spec = num(&r, "/max_spectrum_distance")?;
    let mom = num(&r, "/max_momentum_mismatch")?;
    let variants_ok = states
        .iter()
        .filter(|s| s["roots"].as_array().is_some_and(|a| !a.is_empty()))
        .all(|s| s["momentum_variant"] == "single_particle");
    require(
        states.len() == 5 && r["unmatched"] == 0 && eig <= 1e-8 && spec <= 1e-8 && mom <= 1e-6 && variants_ok,
        format!("{} states, eigen residual {eig:e} ≤ 1e-8, spectrum {spec:e}, momentum {mom:e} ≤ 1e-6", states.len()),
    )
}

fn c4_qkz() -> Check {
    let r = result("qkz-check", json!({ "ladder": [25, 50, 100, 200] }))?;
    let ladder: Vec<f64> = r["ladder"].as_array().ok_or("no ladder")?.iter().filter_map(Value::as_f64).collect();
    let monotone = ladder.windows(2).all(|w| w[1] < w[0]);
    let adaptive = num(&r, "/adaptive/residual")?;
    let trunc = r["adaptive"]["truncation"].clone();
    require(
        ladder.len() == 4 && monotone && adaptive <= 1e-4,
        format!("ladder {ladder:?} decreasing; adaptive residual {adaptive:e} ≤ 1e-4 at l_max = {trunc}"),
    )
}

fn c5_yang_yang() -> Check {
    let r = result("qkz-check", json!({}))?;
    let points = r["yang_yang"].as_array().map_or(0, Vec::len);
    let yy = num(&r, "/yang_yang_max_rel_error")?;
    let saddle = num(&r, "/saddle_max_residual")?;
    let sharp = r["saddles"]
        .as_array()
        .is_some_and(|s| s.iter().all(|x| x["perturbed_residual"].as_f64() >= x["saddle_residual"].as_f64().map(|v| 10.0 * v)));
    require(
        points == 10 && yy <= 1e-6 && saddle <= 1e-4 && sharp,
        format!("{points} points, exp(−S) vs Gamma product {yy:e} ≤ 1e-6; saddle residual {saddle:e} ≤ 1e-4"),
    )
}

fn c6_density() -> Check {
    let g = result("density", json!({ "n": 100, "inv_g": 2.0, "half_width": 20.0, "nodes": 2001, "h0": 1.0, "halvings": 2 }))?;
    let defect = num(&g, "/closed_form_defect")?;
    let norm = num(&g, "/norm_error")?;
    let order = num(&g, "/min_order")?;
    let sz0 = num(&g, "/sz")?;
    let h = result("density", json!({ "n": 100, "holes": [-0.4, 0.4], "halvings": 0 }))?;
    let sz = num(&h, "/sz")?;
    require(
        defect <= 1e-6 && norm <= 1e-8 && order >= 2.0 && sz0.abs() <= 1e-8 * 100.0 && (sz - 1.0).abs() <= 1e-6 * 100.0,
        format!("defect {defect:e} ≤ 1e-6, |∫ρ − N/2|/N = {norm:e} ≤ 1e-8, min order {order:.2} ≥ 2, two-hole S^z = {sz:.9}"),
    )
}

fn c7_spinon() -> Check {
    let r = result("spinon-fit", json!({ "hole_grid": "-1:1:0.1", "sizes": [32, 64, 128] }))?;
    let dev = num(&r, "/max_rel_dev")?;
    let ratio = num(&r, "/gap_ratio")?;
    require(
        dev <= 5e-3 && (ratio - 1.0).abs() <= 0.1,
        format!("|E/E0 − cosh πλ|/cosh πλ ≤ {dev:e} (≤ 5e-3); finite-N gap / 2Λe^(−π/g) = {ratio:.4} (±10%)"),
    )
}

fn c8_mass_gap() -> Check {
    let m = result("mass-gap", json!({ "alpha": 1.0, "beta": 2.0, "cutoff": 2000.0, "m0": 4.0, "t_grid": "0:10:0.1" }))?;
    let fit = num(&m, "/fit_residual")?;
    let t0d = num(&m, "/t0_defect")?;
    let rg = result("rg-flow", json!({}))?;
    let slope = num(&rg, "/loglog_slope")?;
    let a = result("classify-regime", json!({ "t_over_t0": 1.0 }))?;
    let f = result("classify-regime", json!({ "alpha": 10.0, "t_over_t0": 10.0 }))?;
    let ratio = num(&f, "/drive_ratio")?;
    require(
        fit <= 1e-8
            && m["monotone"] == true
            && t0d <= f64::EPSILON
            && (slope - 2.0).abs() <= 0.01
            && a["regime"] == "adiabatic"
            && f["regime"] == "fast-driving"
            && (ratio - 100.0).abs() <= 1e-9,
        format!(
            "affine residual {fit:e} ≤ 1e-8, log–log slope {slope:.5}, t0 defect {t0d:e}, regimes {} / {} (ratio {ratio})",
            a["regime"], f["regime"]
        ),
    )
}

fn c9_classical() -> Check {
    let r = result("r-classical", json!({ "lambda": 0.7, "lambda23": -1.9 }))?;
    let anti = num(&r, "/antisymmetry")?;
    let cybe = num(&r, "/cybe_residual")?;
    let order = num(&r, "/order")?;
    require(
        anti <= 1e-8 && cybe <= 1e-8 && (order - 1.0).abs() <= 0.1,
        format!("antisymmetry {anti:e}, CYBE {cybe:e} (≤ 1e-8), order {order:.3}"),
    )
}

fn c10_reproducibility() -> Check {
    let exe = env!("CARGO_BIN_EXE_tdgn");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 4] = [
        &["verify-yb", "--samples", "100", "--seed", "7"],
        &["verify-transport", "--seed", "7"],
        &["mass-gap", "--t-grid", "0:10:0.1"],
        &["density", "--halvings", "0"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut bytes = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("run{k}_{rep}"));
            let status = Command::new(exe)
                .args(*args)
                .arg("-o")
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            if status.code() != Some(0) {
                return Err(format!("{args:?} exited with {status}"));
            }
            let mut b = std::fs::read(&out).map_err(|e| e.to_string())?;
            let side = Path::new(&format!("{}.meta.json", out.display())).to_path_buf();
            if side.exists() {
                b.extend(std::fs::read(&side).map_err(|e| e.to_string())?);
            }
            bytes.push(b);
        }
        if bytes[0] != bytes[1] {
            return Err(format!("{args:?} differs between identical runs"));
        }
    }
    let start = Instant::now();
    let out = Command::new(exe).args(["replay", "--all"]).output().map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let text = String::from_utf8_lossy(&out.stdout);
    let summary = text.lines().last().unwrap_or_default().to_string();
    require(
        out.status.code() == Some(0) && t <= Duration::from_secs(300),
        format!("{} commands byte-identical twice; replay --all: {summary} in {:.1} s (< 300 s)", runs.len(), t.as_secs_f64()),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Yang–Baxter suite", c1_yang_baxter),
        ("transport and commutation", c2_transport),
        ("Bethe oracle at N = 4", c3_bethe_oracle),
        ("qKZ residual", c4_qkz),
        ("Yang–Yang and saddle point", c5_yang_yang),
        ("density equations", c6_density),
        ("spinon dispersion and gap", c7_spinon),
        ("mass gap, RG form, regimes", c8_mass_gap),
        ("classical limit", c9_classical),
        ("reproducibility and replay", c10_reproducibility),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = f();
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS criterion {} ({name}) [{secs:.2} s]: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) [{secs:.2} s]: {msg}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
