//! Writes a synthetic embedding store whose contested pairs reproduce the
//! `reported_metric` column of a rulings CSV.
//!
//! Every work starts from a shared direction plus a private orthogonal one, so
//! any two unrelated works have cosine `RHO`. A derivative mixes its original
//! with a fresh generic work, weighted so that its cosine to the original is
//! exactly the reported value.
//!
//! ```text
//! cargo run -p airoyalties --example synth_embeddings -- data/rulings.csv data/embeddings.jsonl
//! ```

use std::collections::BTreeMap;
use std::io::BufWriter;
use std::path::PathBuf;

use airoyalties::cases::load_cases;
use airoyalties::embedstore::write_store;
use airoyalties_core::{EmbeddingRecord, EmbeddingStore};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIM: usize = 512;
const RHO: f64 = 0.45;
const SEED: u64 = 20240229;
const MODEL_ID: &str = "synthetic-placeholder-512";

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthonormal_basis(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v: Vec<f64> = (0..DIM).map(|_| rng.random_range(-1.0..1.0)).collect();
        // two passes of Gram-Schmidt keep the basis orthogonal to ~1e-16
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args_os().skip(1);
    let cases_path = PathBuf::from(args.next().unwrap_or_else(|| "data/rulings.csv".into()));
    let out_path = PathBuf::from(
        args.next()
            .unwrap_or_else(|| "data/embeddings.jsonl".into()),
    );
    let cases = load_cases(&cases_path)?;

    let originals: Vec<&str> = {
        let mut ids: Vec<&str> = cases.iter().map(|c| c.original_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    };
    // shared direction + one private direction per original + two per derivative
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let basis = orthonormal_basis(1 + originals.len() + 2 * cases.len(), &mut rng);
    let (shared, mut private) = (&basis[0], basis[1..].iter());

    let mut generic = || -> Vec<f64> {
        let u = private.next().expect("basis sized for every work");
        shared
            .iter()
            .zip(u)
            .map(|(c, x)| RHO.sqrt() * c + (1.0 - RHO).sqrt() * x)
            .collect()
    };

    let mut vectors: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for id in &originals {
        vectors.insert(id.to_string(), generic());
    }
    for case in &cases {
        let s = case
            .reported_metric
            .ok_or_else(|| format!("{} has no reported_metric", case.case_id))?;
        // cos(alpha*o + g, o) = t / sqrt(t^2 + 1 - RHO^2) with t = alpha + RHO
        let t = s * (1.0 - RHO * RHO).sqrt() / (1.0 - s * s).sqrt();
        let alpha = t - RHO;
        let o = &vectors[&case.original_id];
        let d: Vec<f64> = o
            .iter()
            .zip(generic())
            .map(|(x, g)| alpha * x + g)
            .collect();
        let norm = dot(&d, &d).sqrt();
        let d = d.into_iter().map(|x| x / norm).collect();
        if vectors.insert(case.derivative_id.clone(), d).is_some() {
            return Err(format!("derivative {} appears twice", case.derivative_id).into());
        }
    }

    let mut store = EmbeddingStore::new();
    for (id, v) in vectors {
        store.insert(EmbeddingRecord::new(id, MODEL_ID, DIM, v)?)?;
    }
    let file = std::fs::File::create(&out_path)?;
    write_store(&store, BufWriter::new(file))?;
    eprintln!("wrote {} records to {}", store.len(), out_path.display());
    Ok(())
}
