//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
//! `FLOQUET_ACCEPTANCE=3,5` restricts the run to the listed criteria.

use std::process::ExitCode;

use floquet_qa_cli::verify;

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::var("FLOQUET_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|id| id.trim().parse().ok()).collect())
        .unwrap_or_default();
    println!("acceptance criteria");
    let records = verify::run_all(&only, |r| {
        println!("{}", r.line());
        for note in &r.notes {
            println!("      note: {note}");
        }
    });
    let failed: Vec<String> = records.iter().filter(|r| !r.passed).map(|r| format!("AC{}", r.id)).collect();
    println!("{} of {} criteria passed", records.len() - failed.len(), records.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
