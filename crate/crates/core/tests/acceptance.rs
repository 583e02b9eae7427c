//! Acceptance suite. Prints one line per criterion and fails if any fails.
//!
//! `LIPMINOR_PROFILE=quick` selects the smaller sample sizes; the default is
//! the full profile. `LIPMINOR_CRITERIA=1,6,7` restricts the run.

use std::process::ExitCode;

use lipminor::acceptance::{Profile, Suite, CRITERIA};

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

fn main() -> ExitCode {
    let profile: Profile = match std::env::var("LIPMINOR_PROFILE") {
        Ok(p) => p.parse().expect("LIPMINOR_PROFILE must be quick or full"),
        Err(_) => Profile::Full,
    };
    let ids: Vec<u32> = match std::env::var("LIPMINOR_CRITERIA") {
        Ok(list) => list
            .split(',')
            .map(|s| s.trim().parse().expect("LIPMINOR_CRITERIA is a comma-separated id list"))
            .collect(),
        Err(_) => CRITERIA.iter().map(|c| c.0).collect(),
    };
    println!("acceptance suite, {profile} profile");
    let suite = Suite::new(profile);
    let mut failed = 0;
    for id in ids {
        let result = suite.run(id);
        println!("{result}");
        failed += usize::from(!result.pass);
    }
    if failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
