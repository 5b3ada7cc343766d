use qkl::verify::{run_suite, VerifyOptions, SUITE_NAMES};
use std::process::ExitCode;

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let only: Option<usize> = std::env::var("QKL_SUITE").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for id in 1..=SUITE_NAMES.len() {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let r = run_suite(id, &opts);
        let status = if r.pass() { "PASS" } else { "FAIL" };
        let detail = match (&r.error, r.worst()) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(w)) => format!("worst {} = {:.3e} (tol {:.0e})", w.name, w.value, w.tol),
            (None, None) => "no checks".to_string(),
        };
        println!("criterion {id} {:<18} {status}  {detail}  [{:.1}s]", r.name, r.seconds);
        if std::env::var_os("QKL_VERBOSE").is_some() {
            for c in &r.checks {
                println!("    {:<48} {:.3e} < {:.0e} {}", c.name, c.value, c.tol, if c.pass() { "ok" } else { "FAIL" });
            }
        }
        if !r.pass() {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
