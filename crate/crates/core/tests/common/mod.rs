//! Oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sfdi::corpus::Utterance;
use sfdi::synth::synth_corpus;

/// Solves the Toeplitz normal equations `R a = -r` by Gaussian elimination
/// with partial pivoting.
pub fn toeplitz_solve(r: &[f64], order: usize) -> Vec<f64> {
    let n = order;
    let mut m = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = r[i.abs_diff(j)];
        }
        m[i][n] = -r[i + 1];
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// Biased autocorrelation of a random coloured signal; positive definite
/// for every order below the signal length.
pub fn random_pd_autocorrelation(rng: &mut ChaCha8Rng, order: usize) -> Vec<f64> {
    let n = rng.random_range(64..400);
    let pole: f64 = rng.random_range(-0.95..0.95);
    let mut x = Vec::with_capacity(n);
    let mut prev = 0.0;
    for _ in 0..n {
        prev = pole * prev + rng.random_range(-1.0..1.0);
        x.push(prev);
    }
    (0..=order)
        .map(|k| x[..n - k].iter().zip(&x[k..]).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest root magnitude of `1 + a1 z^-1 + ... + aM z^-M`, via the
/// eigenvalues of its companion matrix.
pub fn max_root_magnitude(coefficients: &[f64]) -> f64 {
    let m = coefficients.len();
    if m == 0 {
        return 0.0;
    }
    let mut c = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        c[(0, j)] = -coefficients[j];
    }
    for i in 1..m {
        c[(i, i - 1)] = 1.0;
    }
    c.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Mixed-rate synthetic corpus: `n16` utterances at 16 kHz and `n8` at 8 kHz.
pub fn mixed_corpus(n16: usize, n8: usize, seed: u64) -> Vec<Utterance> {
    let mut corpus = synth_corpus(n16, 16_000, seed);
    corpus.extend(
        synth_corpus(n8, 8_000, seed.wrapping_add(1))
            .into_iter()
            .map(|mut u| {
                u.key = format!("narrow/{}", u.key);
                u
            }),
    );
    corpus
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_sfdi")
}

pub fn sfdi<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(bin())
        .args(args)
        .env_remove("SFDI_CORPUS_ROOT")
        .output()
        .expect("binary runs")
}

/// Every regular file under `dir`, relative path and contents, sorted.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out: Vec<(PathBuf, Vec<u8>)> = walkdir_files(dir)
        .into_iter()
        .map(|p| {
            (
                p.strip_prefix(dir).unwrap().to_path_buf(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn walkdir_files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p);
            }
        }
    }
    out
}
