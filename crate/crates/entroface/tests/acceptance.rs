//! Acceptance suite: one test per shipping criterion, each printing a
//! single `ACCEPTANCE <n> <name>: PASS|FAIL` line (visible with
//! `cargo test --test acceptance -- --nocapture`) with its pinned
//! tolerances in the detail line.
//!
//! The end-to-end criteria (6–9) prefer the real 40-subject portrait
//! corpus when one is present — point `ORL_DIR` at a directory holding
//! `manifest.csv`, or place it under `data/orl/` in the repository root
//! (see `scripts/fetch_orl.py`). Without it they run on the deterministic
//! synthetic stand-in dataset, and the printed line says so.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use entroface::config::PipelineConfig;
use entroface::dct::{dct2, idct2};
use entroface::entropy::{binary_renyi, binary_shannon, renyi_map, shannon_map};
use entroface::eval::{baseline_raw_pixels, evaluate_prepared, run_pipeline, split_ep1};
use entroface::illum::{normalize_illumination, DcTarget, IlluminationParams};
use entroface::image::{load_pgm, save_pgm, GrayImage};
use entroface::keca::{eigendecompose, entropy_contributions, renyi_estimate, select_axes};
use entroface::kernel::{arc_cosine_kernel, GramMatrix};
use entroface::manifest::{save_manifest, DatasetManifest, ManifestEntry};
use entroface::oracle::{arccos_kernel_mc, dct2_direct};
use entroface::pipeline::features_from_manifest;
use entroface::synth::{synth_image, write_dataset, SynthSpec};

fn verdict(n: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {n} {name}: {}\n    {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    let pixels = (0..w * h).map(|_| rng.gen_range(0.0..255.0)).collect();
    GrayImage::new(w, h, pixels, 255.0).unwrap()
}

// ---------------------------------------------------------------------------
// Dataset resolution for the end-to-end criteria.

struct Corpus {
    manifest: DatasetManifest,
    /// Printed in the verdict so stand-in runs are never mistaken for runs
    /// on the real corpus.
    description: &'static str,
}

fn corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        if let Some(path) = real_corpus_manifest() {
            match DatasetManifest::load(&path) {
                Ok(manifest) if manifest.len() >= 100 => {
                    return Corpus {
                        manifest,
                        description: "real ORL corpus",
                    };
                }
                Ok(_) | Err(_) => {
                    eprintln!("note: manifest at {} unusable; using stand-in", path.display())
                }
            }
        }
        let dir = std::env::temp_dir().join("entroface-acceptance-standin");
        let manifest_path = dir.join("manifest.csv");
        if !manifest_path.exists() {
            write_dataset(&SynthSpec::default(), &dir).expect("stand-in renders");
        }
        Corpus {
            manifest: DatasetManifest::load(&manifest_path).expect("stand-in loads"),
            description: "synthetic stand-in (ORL not present)",
        }
    })
}

fn real_corpus_manifest() -> Option<PathBuf> {
    if let Ok(dir) = std::env::var("ORL_DIR") {
        let p = PathBuf::from(dir).join("manifest.csv");
        if p.exists() {
            return Some(p);
        }
    }
    let repo = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/orl/manifest.csv");
    repo.exists().then_some(repo)
}

/// Ten images from the corpus with every pixel lifted to ≥ 1 so that gain
/// scaling never interacts with the log-floor ε.
fn fixtures() -> Vec<GrayImage> {
    let c = corpus();
    c.manifest
        .entries()
        .iter()
        .step_by(c.manifest.len() / 10)
        .take(10)
        .map(|e| {
            load_pgm(&c.manifest.resolve(e))
                .expect("fixture loads")
                .map(|p| p.max(1.0))
        })
        .collect()
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance_1_dct_correctness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_round = 0.0f64;
    let mut worst_parseval = 0.0f64;
    for i in 0..100 {
        let n = if i < 50 { 8 } else { 64 };
        let img = random_image(&mut rng, n, n);
        let coeffs = dct2(&img);
        let back = idct2(&coeffs);
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            worst_round = worst_round.max((a - b).abs());
        }
        let pe: f64 = img.pixels().iter().map(|p| p * p).sum();
        let ce: f64 = coeffs.coeffs().iter().map(|c| c * c).sum();
        worst_parseval = worst_parseval.max((pe - ce).abs() / pe);
    }
    let mut worst_oracle = 0.0f64;
    for _ in 0..50 {
        let img = random_image(&mut rng, 8, 8);
        let fast = dct2(&img);
        let direct = dct2_direct(&img);
        for (a, b) in fast.coeffs().iter().zip(direct.coeffs()) {
            worst_oracle = worst_oracle.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst_round < 1e-9
        && worst_parseval < 1e-9
        && worst_oracle < 1e-10
        && elapsed.as_secs_f64() < 5.0;
    verdict(
        1,
        "dct-correctness",
        pass,
        &format!(
            "round-trip {worst_round:.2e} (<1e-9), energy {worst_parseval:.2e} (<1e-9), \
             vs direct summation {worst_oracle:.2e} (<1e-10), {:.2}s (<5s)",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn acceptance_2_arc_cosine_kernels() {
    // Pair geometry is rejection-sampled: angles near J₂'s zero (θ ≈ 2.6)
    // or vanishing norms make a relative tolerance meaningless, and wide
    // angles inflate the heavy-tailed degree-2 estimator's variance until
    // 10⁶ samples no longer buy a 2% band.
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let g: Vec<f64> = (0..3).map(|_| StandardNormal.sample(rng)).collect();
        let norm = (g.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let target: f64 = rng.gen_range(0.7..1.5);
        g.iter().map(|v| v * target / norm).collect()
    };
    let mut pairs = Vec::new();
    while pairs.len() < 20 {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let theta = (dot / (nx * ny)).clamp(-1.0, 1.0).acos();
        if (0.15..=1.3).contains(&theta) {
            pairs.push((x, y));
        }
    }

    let mut worst_rel = 0.0f64;
    for (i, (x, y)) in pairs.iter().enumerate() {
        for n in 0..=2u32 {
            let exact = arc_cosine_kernel(x, y, n).unwrap();
            let (mc, _stderr) = arccos_kernel_mc(x, y, n, 1_000_000, 3_000 + i as u64);
            worst_rel = worst_rel.max((mc - exact).abs() / exact.abs());
        }
    }

    let mut worst_exact = 0.0f64;
    for (x, _) in &pairs {
        let k0 = arc_cosine_kernel(x, x, 0).unwrap();
        worst_exact = worst_exact.max((k0 - 1.0).abs());
        let k2 = arc_cosine_kernel(x, x, 2).unwrap();
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        worst_exact = worst_exact.max((k2 - 3.0 * norm2 * norm2).abs());
    }

    let pass = worst_rel < 0.02 && worst_exact < 1e-9;
    verdict(
        2,
        "arc-cosine-kernels",
        pass,
        &format!(
            "20 pairs x n∈{{0,1,2}}, 10⁶ samples: worst relative gap {worst_rel:.4} (<0.02); \
             K₀(x,x)−1 and K₂(x,x)−3‖x‖⁴ worst {worst_exact:.2e} (<1e-9)"
        ),
    );
}

#[test]
fn acceptance_3_spectral_identity() {
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(30_000 + seed);
        let n = rng.gen_range(2..=50);
        let a = nalgebra::DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let k = &a * a.transpose();
        let gram = GramMatrix::from_matrix((&k + k.transpose()) * 0.5).unwrap();
        let (v_hat, _) = renyi_estimate(&gram).unwrap();
        let es = eigendecompose(&gram).unwrap();
        let total: f64 = entropy_contributions(&es, n).unwrap().iter().sum();
        worst = worst.max((v_hat - total).abs());
    }
    verdict(
        3,
        "spectral-identity",
        worst < 1e-10,
        &format!("100 PSD Grams (N ≤ 50): max |direct − spectral| = {worst:.2e} (<1e-10)"),
    );
}

#[test]
fn acceptance_4_axis_selection() {
    // Two identical points: the antisymmetric eigenvector has eᵀ1 = 0 and
    // must be excluded, leaving exactly one usable axis.
    let k = 0.5;
    let gram = GramMatrix::from_matrix(nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[1.0, k, k, 1.0],
    ))
    .unwrap();
    let es = eigendecompose(&gram).unwrap();
    let axes = select_axes(&es, 2, 1e-12, 1e-10).unwrap();
    let two_point_ok = axes.len() == 1 && (axes[0].eigenvalue - (1.0 + k)).abs() < 1e-12;

    // A 3×3 case where the entropy ranking contradicts the eigenvalue
    // ranking: λ = 5 concentrates on an axis nearly orthogonal to 1, while
    // λ = 3 aligns with it, so the λ = 3 axis must come first.
    let e1 = nalgebra::DVector::from_column_slice(&[1.0, 0.0, 0.0]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let e2 = nalgebra::DVector::from_column_slice(&[0.0, s, s]);
    let e3 = nalgebra::DVector::from_column_slice(&[0.0, s, -s]);
    let k3: nalgebra::DMatrix<f64> =
        5.0 * &e1 * e1.transpose() + 3.0 * &e2 * e2.transpose() + 0.5 * &e3 * e3.transpose();
    let gram3 = GramMatrix::from_matrix(k3).unwrap();
    let es3 = eigendecompose(&gram3).unwrap();
    let axes3 = select_axes(&es3, 2, 1e-12, 1e-10).unwrap();
    // Contributions: λ=3 axis gives 3·(√2)²/9 = 6/9; λ=5 axis gives 5/9.
    let entropy_order_ok = axes3.len() == 2
        && (axes3[0].eigenvalue - 3.0).abs() < 1e-9
        && (axes3[1].eigenvalue - 5.0).abs() < 1e-9
        && axes3[0].contribution > axes3[1].contribution;

    verdict(
        4,
        "keca-axis-selection",
        two_point_ok && entropy_order_ok,
        &format!(
            "2-point case kept {} axis (λ = {:.3}); 3×3 case order λ = [{:.1}, {:.1}] \
             with contributions [{:.4}, {:.4}]",
            axes.len(),
            axes[0].eigenvalue,
            axes3[0].eigenvalue,
            axes3[1].eigenvalue,
            axes3[0].contribution,
            axes3[1].contribution
        ),
    );
}

#[test]
fn acceptance_5_entropy_maps() {
    // Argmax of both maps over a probability grid sits at p = 0.5.
    let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let sh = shannon_map(&grid).unwrap();
    let re = renyi_map(&grid, 2.0).unwrap();
    let argmax = |m: &[f64]| {
        m.iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0
    };
    let argmax_ok = (grid[argmax(&sh)] - 0.5).abs() < 1e-12 && (grid[argmax(&re)] - 0.5).abs() < 1e-12;

    // Rényi order q → 1 recovers Shannon.
    let mut worst_limit = 0.0f64;
    for i in 1..=9 {
        let p = i as f64 / 10.0;
        worst_limit = worst_limit.max((binary_renyi(p, 1.0001) - binary_shannon(p)).abs());
    }

    verdict(
        5,
        "entropy-maps",
        argmax_ok && worst_limit < 1e-3,
        &format!(
            "argmax at p = 0.5 for Shannon and Rényi(q=2); \
             max |Rényi(q=1.0001) − Shannon| = {worst_limit:.2e} (<1e-3) on p ∈ {{0.1..0.9}}"
        ),
    );
}

#[test]
fn acceptance_6_illumination_gain_invariance() {
    let params = IlluminationParams {
        equalize: false,
        dc_target: DcTarget::Fixed(entroface::illum::DEFAULT_DC_TARGET),
        ..IlluminationParams::default()
    };
    let images = fixtures();
    let mut worst = 0.0f64;
    for img in &images {
        let reference = normalize_illumination(img, &params).unwrap();
        for c in [0.5, 2.0, 10.0] {
            let scaled = img.map(|p| p * c);
            let out = normalize_illumination(&scaled, &params).unwrap();
            for (a, b) in reference.pixels().iter().zip(out.pixels()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    verdict(
        6,
        "illumination-gain-invariance",
        worst < 1e-6,
        &format!(
            "{} fixtures ({}), c ∈ {{0.5, 2, 10}}, equalization bypassed: \
             max pixel deviation {worst:.2e} (<1e-6)",
            images.len(),
            corpus().description
        ),
    );
}

#[test]
fn acceptance_7_end_to_end_ep1() {
    let c = corpus();
    let cfg = PipelineConfig::default();
    let start = Instant::now();

    let split5 = split_ep1(&c.manifest, 5).unwrap();
    let pipeline5 = run_pipeline(&c.manifest, &split5, &cfg).unwrap();
    let baseline5 = baseline_raw_pixels(&c.manifest, &split5, &cfg).unwrap();
    let elapsed5 = start.elapsed();

    let split2 = split_ep1(&c.manifest, 2).unwrap();
    let pipeline2 = run_pipeline(&c.manifest, &split2, &cfg).unwrap();

    let pass = pipeline5.accuracy >= 0.85
        && pipeline5.accuracy > baseline5.accuracy
        && elapsed5.as_secs_f64() < 300.0;
    verdict(
        7,
        "end-to-end-ep1",
        pass,
        &format!(
            "{}: EP1(5) accuracy {:.4} (≥0.85 required) vs raw-pixel baseline {:.4} \
             (strictly greater required), {:.1}s (<300s); EP1(2) recorded: {:.4}",
            c.description,
            pipeline5.accuracy,
            baseline5.accuracy,
            elapsed5.as_secs_f64(),
            pipeline2.accuracy
        ),
    );
}

#[test]
fn acceptance_8_report_determinism() {
    let c = corpus();
    let dir = tempfile::tempdir().unwrap();
    let manifest_arg = c
        .manifest
        .base_dir()
        .join("manifest.csv")
        .display()
        .to_string();
    let mut reports = Vec::new();
    for (threads, name) in [("1", "t1.json"), ("0", "tn.json"), ("0", "tn2.json")] {
        let report = dir.path().join(name);
        let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_entroface"));
        cmd.arg("evaluate")
            .args(["--manifest", &manifest_arg])
            .args(["--protocol", "ep1"])
            .args(["--train", "5"])
            .args(["--report", report.to_str().unwrap()]);
        if threads != "0" {
            cmd.args(["--threads", threads]);
        }
        let out = cmd.output().expect("binary launches");
        assert!(
            out.status.success(),
            "evaluate failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        reports.push(std::fs::read(&report).unwrap());
    }
    let pass = reports[0] == reports[1] && reports[1] == reports[2];
    verdict(
        8,
        "report-determinism",
        pass,
        &format!(
            "{}: three `evaluate` runs (1 thread, default threads twice) produced \
             byte-identical {}-byte reports: {pass}",
            c.description,
            reports[0].len()
        ),
    );
}

#[test]
fn acceptance_9_degenerate_data_sanity() {
    let c = corpus();
    let cfg = PipelineConfig::default();

    // Permuted labels: accuracy must collapse to chance level.
    let mut data = features_from_manifest(&c.manifest, &cfg).unwrap();
    let n = data.len();
    let original = data.labels.clone();
    for i in 0..n {
        data.labels[i] = original[(i * 37 + 11) % n].clone();
    }
    let split = split_ep1(&c.manifest, 5).unwrap();
    let permuted = evaluate_prepared(&data, &split, &cfg).unwrap();
    let classes = c.manifest.subject_ids().len() as f64;
    let chance_ok = permuted.accuracy <= 3.0 / classes;

    // Perfectly separable two-class data: accuracy must be exactly 1.
    let dir = tempfile::tempdir().unwrap();
    let spec = SynthSpec {
        subjects: 2,
        images_per_subject: 1,
        width: 46,
        height: 56,
        seed: 99,
    };
    let mut entries = Vec::new();
    for subject in 1..=2u64 {
        let img = synth_image(&spec, subject as usize, 1);
        for index in 1..=4u32 {
            let name = format!("s{subject}_{index}.pgm");
            save_pgm(&img, &dir.path().join(&name)).unwrap();
            entries.push(ManifestEntry {
                path: name.into(),
                subject_id: format!("s{subject}"),
                index,
            });
        }
    }
    let manifest_path = dir.path().join("manifest.csv");
    save_manifest(&entries, &manifest_path).unwrap();
    let separable = DatasetManifest::load(&manifest_path).unwrap();
    let sep_split = split_ep1(&separable, 2).unwrap();
    let sep_report = run_pipeline(&separable, &sep_split, &cfg).unwrap();
    let separable_ok = sep_report.accuracy == 1.0;

    verdict(
        9,
        "degenerate-data-sanity",
        chance_ok && separable_ok,
        &format!(
            "{}: permuted-label accuracy {:.4} (≤ {:.4} = 3×chance); \
             separable 2-class accuracy {:.1} (= 1.0 required)",
            c.description,
            permuted.accuracy,
            3.0 / classes,
            sep_report.accuracy
        ),
    );
}
