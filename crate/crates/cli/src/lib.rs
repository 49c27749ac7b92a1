//! Command-line front end: JSON instances in, machine-readable reports out.

pub mod commands;
pub mod oracles;
pub mod report;
pub mod rng;
pub mod suites;

/// Caps the global thread pool at `DEHNFORGE_THREADS` when it is set to a positive integer.
pub fn configure_threads() -> Result<(), String> {
    match std::env::var("DEHNFORGE_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| format!("DEHNFORGE_THREADS must be a positive integer, got {v:?}"))?;
            if n == 0 {
                return Err("DEHNFORGE_THREADS must be positive".into());
            }
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
        }
        Err(_) => Ok(()),
    }
}
