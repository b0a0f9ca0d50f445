//! Runs every acceptance criterion, printing one PASS/FAIL line each, and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

fn main() -> ExitCode {
    let mut failed = 0;
    for (i, (desc, f)) in sandpile_verify::criteria().into_iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(notes) => println!("criterion {}: PASS - {desc} [{}] ({secs:.1}s)", i + 1, notes.join(", ")),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL - {desc}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
