//! Measures the implied constants `K_r` and `C_{r,s}` by exhaustive
//! maximization and writes them to `data/constants.json`.
//!
//! cargo run --release -p gapsum-core --example measure_constants

use std::collections::BTreeMap;
use std::path::Path;

use gapsum_core::constants::{
    congruence_family_maximum, l1_family, round_up, MeasuredConstants, Provenance, FAMILY_MAX_Q,
    RANK_THREE_MAX_Q,
};
use sha2::{Digest, Sha256};

const SCRIPT: &str = include_str!("measure_constants.rs");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut k = BTreeMap::new();
    for r in 1..=3 {
        let best = congruence_family_maximum(r)?;
        println!(
            "K_{r}: max ratio {:.9} over {} instances, witness {:?}",
            best.ratio, best.instances, best.witness
        );
        k.insert(r.to_string(), round_up(best.ratio));
    }
    let mut c: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for r in 1..=2 {
        for s in 1..=2 {
            let stats = l1_family(r, s)?;
            println!(
                "C_{r},{s}: max ratio {:.9} over {} GAPs, witness {}",
                stats.max_ratio,
                stats.checked,
                stats
                    .witness
                    .as_ref()
                    .map(|g| g.to_json())
                    .unwrap_or_default()
            );
            c.entry(r.to_string())
                .or_default()
                .insert(s.to_string(), round_up(stats.max_ratio));
        }
    }
    let constants = MeasuredConstants {
        k,
        c,
        provenance: Provenance {
            script: "crates/core/examples/measure_constants.rs".into(),
            script_sha256: hex::encode(Sha256::digest(SCRIPT.as_bytes())),
            congruence_family: format!(
                "r in 1..=2: 2 <= q <= {FAMILY_MAX_Q}, s in 1..=2; r = 3: 2 <= q <= {RANK_THREE_MAX_Q}, s = 1; \
                 nonzero generators up to GL_s(Z_q), interval lengths {{1, ceil(q/4), ceil(q/2), q}}, \
                 every interval start, every H satisfying the kernel condition"
            ),
            fourier_family: format!(
                "2 <= q <= {FAMILY_MAX_Q}, r in 1..=2, s in 1..=2, base 0, nonzero generators up to \
                 GL_s(Z_q), every H in [2, q]^r giving a proper GAP"
            ),
            rounding: "maximum ratio rounded up to a multiple of 1e-6".into(),
        },
    };
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/constants.json");
    std::fs::write(&path, serde_json::to_string_pretty(&constants)? + "\n")?;
    println!("wrote {}", path.display());
    Ok(())
}
