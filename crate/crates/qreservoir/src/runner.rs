//! Config-driven experiment orchestration and CSV output.
//!
//! Every experiment averages over independent realizations of the random
//! couplings; realization `r` uses seed `base + r` so runs are reproducible
//! and independent of the worker count. Floats are written with 17
//! significant digits, so re-reading a CSV reproduces each value exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{QrError, Result};
use crate::gaussian::{build_oscillator_network, run_qelm_instance, squeezed_vacuum, GaussianConfig};
use crate::readout::{classify, nmse, predict, train_classifier, train_linear};
use crate::reservoir::{run_sequence, FeatureMatrix, InputSequence, Reservoir};
use crate::spin::{ObservableSet, SpinConfig, SpinReservoir};
use crate::tasks::{
    ipc_from_features, ipc_input_sequence, squeeze_dataset, timer_sequence, SqueezeClassifySpec,
};

/// Offset separating the dataset/input seed stream from the coupling stream.
const DATA_SEED_OFFSET: u64 = 0x9e37_79b9;

#[derive(Debug, Clone)]
pub struct RunSummary {
    /// Files written, relative to the output directory.
    pub files: Vec<PathBuf>,
    /// Human-readable aggregate lines for terminal output.
    pub notes: Vec<String>,
}

/// Execute the experiment described by `config`, writing CSVs into `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let mut summary = match config.kind {
        ExperimentKind::Timer => run_timer(config, out_dir)?,
        ExperimentKind::Classify => run_classify(config, out_dir)?,
        ExperimentKind::Ipc => run_ipc(config, out_dir)?,
    };
    write_meta(config, out_dir, &summary)?;
    summary.files.push(PathBuf::from("meta.txt"));
    Ok(summary)
}

fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::with_capacity(rows.len() * 64);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn write_meta(config: &ExperimentConfig, out_dir: &Path, summary: &RunSummary) -> Result<()> {
    let mut text = String::new();
    let _ = writeln!(text, "kind = {}", config.kind);
    let _ = writeln!(text, "realizations = {}", config.realizations);
    let _ = writeln!(text, "seed = {}", config.seed);
    let _ = writeln!(text, "washout = {}", config.washout);
    match config.kind {
        ExperimentKind::Timer | ExperimentKind::Ipc => {
            let s = &config.spin;
            let _ = writeln!(text, "spin.n_spins = {}", s.n_spins);
            let _ = writeln!(text, "spin.field_h = {}", s.field_h);
            let _ = writeln!(text, "spin.couplings = [{}, {}]", s.coupling_low, s.coupling_high);
            let _ = writeln!(text, "spin.dt = {}", s.dt);
            let _ = writeln!(text, "spin.multiplex_v = {}", s.multiplex_v);
            let _ = writeln!(text, "spin.encoding = {:?}", s.encoding);
            let _ = writeln!(text, "spin.input_qubit = {}", s.input_qubit);
        }
        ExperimentKind::Classify => {
            let g = &config.gaussian;
            let _ = writeln!(text, "gaussian.n_osc = {}", g.n_osc);
            let _ = writeln!(text, "gaussian.omega0 = {}", g.omega0);
            let _ = writeln!(text, "gaussian.couplings = [{}, {}]", g.coupling_low, g.coupling_high);
            let _ = writeln!(text, "gaussian.dt = {}", g.dt);
            let _ = writeln!(text, "gaussian.input_osc = {}", g.input_osc);
            let _ = writeln!(text, "task.random_phase = {}", config.task.random_phase);
            let _ = writeln!(text, "task.n_train = {}", config.task.n_train);
            let _ = writeln!(text, "task.n_test = {}", config.task.n_test);
        }
    }
    for file in &summary.files {
        let _ = writeln!(text, "output = {}", file.display());
    }
    std::fs::write(out_dir.join("meta.txt"), text)?;
    Ok(())
}

/// Observable subsets evaluated against one full-feature run.
const SPIN_SETS: [ObservableSet; 3] = [ObservableSet::Z, ObservableSet::Xyz, ObservableSet::XyzZz];

fn set_name(set: ObservableSet) -> &'static str {
    match set {
        ObservableSet::Z => "z",
        ObservableSet::Xyz => "xyz",
        ObservableSet::XyzZz => "xyz_zz",
    }
}

/// Columns of `subset` inside a full-feature matrix with `v` multiplexed
/// blocks of `ObservableSet::XyzZz` width each.
fn subset_columns(n_spins: usize, v: usize, subset: ObservableSet) -> Vec<usize> {
    let block = ObservableSet::XyzZz.len(n_spins);
    let within = subset.columns_within_full(n_spins);
    let mut cols = Vec::with_capacity(v * within.len());
    for b in 0..v {
        cols.extend(within.clone().map(|c| b * block + c));
    }
    cols
}

fn select_columns(x: &FeatureMatrix, cols: &[usize]) -> FeatureMatrix {
    let mut out = Array2::zeros((x.nrows(), cols.len()));
    for (j, &c) in cols.iter().enumerate() {
        out.column_mut(j).assign(&x.column(c));
    }
    out
}

/// Build the spin reservoir for one realization, always measuring the full
/// observable set so subsets can be sliced without re-running the dynamics.
fn full_spin_reservoir(base: &SpinConfig, seed: u64) -> Result<SpinReservoir> {
    SpinReservoir::new(SpinConfig {
        observable_set: ObservableSet::XyzZz,
        seed,
        ..base.clone()
    })
}

struct TimerRealization {
    /// Predictions for each (tau, set) pair, post-washout rows.
    predictions: Vec<Vec<f64>>,
    nmse: Vec<f64>,
}

fn run_timer(config: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary> {
    let task = &config.task;
    let washout = config.washout;
    let kept = task.length - washout;
    let pairs: Vec<(usize, ObservableSet)> = task
        .tau
        .iter()
        .flat_map(|&tau| SPIN_SETS.iter().map(move |&set| (tau, set)))
        .collect();

    let per_real: Vec<TimerRealization> = (0..config.realizations)
        .into_par_iter()
        .map(|r| -> Result<TimerRealization> {
            let reservoir = full_spin_reservoir(&config.spin, config.seed + r as u64)?;
            let (inputs, _) = timer_sequence(task.c, task.tau[0], task.length)?;
            let full =
                run_sequence(&reservoir, &mut reservoir.initial_state(), &inputs, washout)?;
            let mut predictions = Vec::with_capacity(pairs.len());
            let mut errors = Vec::with_capacity(pairs.len());
            for &(tau, set) in &pairs {
                let (_, target) = timer_sequence(task.c, tau, task.length)?;
                let target = &target[washout..];
                let x = select_columns(
                    &full,
                    &subset_columns(config.spin.n_spins, config.spin.multiplex_v, set),
                );
                let w = train_linear(&x, target, task.ridge)?;
                let y = predict(&x, &w)?;
                errors.push(nmse(y.as_slice().unwrap(), target)?);
                predictions.push(y.to_vec());
            }
            Ok(TimerRealization { predictions, nmse: errors })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut files = Vec::new();
    let mut notes = Vec::new();
    for (p, &(tau, set)) in pairs.iter().enumerate() {
        let (_, target) = timer_sequence(task.c, tau, task.length)?;
        let mut rows = Vec::with_capacity(kept);
        for k in 0..kept {
            let mut row = vec![format!("{}", washout + k), format_float(target[washout + k])];
            let mut sum = 0.0;
            for real in &per_real {
                let v = real.predictions[p][k];
                sum += v;
                row.push(format_float(v));
            }
            row.push(format_float(sum / per_real.len() as f64));
            rows.push(row);
        }
        let mut header = String::from("step,target");
        for r in 0..per_real.len() {
            let _ = write!(header, ",pred_{r}");
        }
        header.push_str(",mean_prediction");
        let name = format!("trajectory_{tau}_{}.csv", set_name(set));
        write_csv(&out_dir.join(&name), &header, &rows)?;
        files.push(PathBuf::from(name));
    }

    let mut rows = Vec::new();
    for (p, &(tau, set)) in pairs.iter().enumerate() {
        let mut sum = 0.0;
        for (r, real) in per_real.iter().enumerate() {
            sum += real.nmse[p];
            rows.push(vec![
                tau.to_string(),
                set_name(set).to_string(),
                r.to_string(),
                format_float(real.nmse[p]),
            ]);
        }
        let mean = sum / per_real.len() as f64;
        rows.push(vec![
            tau.to_string(),
            set_name(set).to_string(),
            "mean".to_string(),
            format_float(mean),
        ]);
        notes.push(format!("tau={tau} observables={} mean NMSE {mean:.3e}", set_name(set)));
    }
    write_csv(&out_dir.join("timer_nmse.csv"), "tau,observables,realization,nmse", &rows)?;
    files.push(PathBuf::from("timer_nmse.csv"));
    Ok(RunSummary { files, notes })
}

/// Feature matrix of squeezed-vacuum instances under one network.
fn classify_features(
    config: &GaussianConfig,
    network: &crate::gaussian::SymplecticPropagator,
    samples: &[(f64, f64, f64)],
) -> Result<FeatureMatrix> {
    let width = 2 * (config.n_osc - 1);
    let mut rows = Vec::with_capacity(samples.len() * width);
    for &(r, phi, _) in samples {
        rows.extend(run_qelm_instance(network, &squeezed_vacuum(r, phi)?, config.input_osc)?);
    }
    Array2::from_shape_vec((samples.len(), width), rows)
        .map_err(|e| QrError::Dimension(e.to_string()))
}

fn run_classify(config: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary> {
    let task = &config.task;
    let combos: Vec<usize> = task.n_classes.clone();

    let per_real: Vec<Vec<f64>> = (0..config.realizations)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let seed = config.seed + r as u64;
            let gaussian = GaussianConfig { seed, ..config.gaussian.clone() };
            let network = build_oscillator_network(&gaussian)?;
            let mut accuracies = Vec::with_capacity(combos.len());
            for &n_classes in &combos {
                let spec = SqueezeClassifySpec {
                    n_classes,
                    random_phase: task.random_phase,
                    n_train: task.n_train,
                    n_test: task.n_test,
                    ..SqueezeClassifySpec::default()
                };
                let dataset = squeeze_dataset(&spec, seed.wrapping_add(DATA_SEED_OFFSET))?;
                let x_train = classify_features(&gaussian, &network, &dataset.train)?;
                let labels: Vec<f64> = dataset.train.iter().map(|&(_, _, c)| c).collect();
                let model = train_classifier(&x_train, &labels, &dataset.class_values, task.ridge)?;
                let x_test = classify_features(&gaussian, &network, &dataset.test)?;
                let truth: Vec<f64> = dataset.test.iter().map(|&(_, _, c)| c).collect();
                let decoded = classify(&model, &x_test)?;
                let hits = decoded.iter().zip(&truth).filter(|(a, b)| a == b).count();
                accuracies.push(hits as f64 / truth.len() as f64);
            }
            Ok(accuracies)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (c, &n_classes) in combos.iter().enumerate() {
        let mut sum = 0.0;
        for (r, real) in per_real.iter().enumerate() {
            sum += real[c];
            rows.push(vec![n_classes.to_string(), r.to_string(), format_float(real[c])]);
        }
        let mean = sum / per_real.len() as f64;
        rows.push(vec![n_classes.to_string(), "mean".to_string(), format_float(mean)]);
        notes.push(format!("{n_classes} classes: mean accuracy {:.1}%", 100.0 * mean));
    }
    write_csv(&out_dir.join("classify_summary.csv"), "n_classes,realization,accuracy", &rows)?;
    Ok(RunSummary { files: vec![PathBuf::from("classify_summary.csv")], notes })
}

fn run_ipc(config: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary> {
    let task = &config.task;
    let washout = config.washout;

    // per realization: per-set per-degree retained capacity sums
    let per_real: Vec<Vec<Vec<f64>>> = (0..config.realizations)
        .into_par_iter()
        .map(|r| -> Result<Vec<Vec<f64>>> {
            let seed = config.seed + r as u64;
            let reservoir = full_spin_reservoir(&config.spin, seed)?;
            let raw = ipc_input_sequence(task.length, seed.wrapping_add(DATA_SEED_OFFSET));
            let inputs = InputSequence::from_raw(&raw)?;
            let full =
                run_sequence(&reservoir, &mut reservoir.initial_state(), &inputs, washout)?;
            let mut per_set = Vec::with_capacity(SPIN_SETS.len());
            for &set in &SPIN_SETS {
                let x = select_columns(
                    &full,
                    &subset_columns(config.spin.n_spins, config.spin.multiplex_v, set),
                );
                let report = ipc_from_features(&x, &raw, washout, task.d_max, task.delay_max)?;
                per_set.push(report.per_degree);
            }
            Ok(per_set)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (s, &set) in SPIN_SETS.iter().enumerate() {
        let mut mean_total = 0.0;
        for d in 0..task.d_max {
            let mut sum = 0.0;
            for (r, real) in per_real.iter().enumerate() {
                sum += real[s][d];
                rows.push(vec![
                    set_name(set).to_string(),
                    (d + 1).to_string(),
                    r.to_string(),
                    format_float(real[s][d]),
                ]);
            }
            let mean = sum / per_real.len() as f64;
            mean_total += mean;
            rows.push(vec![
                set_name(set).to_string(),
                (d + 1).to_string(),
                "mean".to_string(),
                format_float(mean),
            ]);
        }
        notes.push(format!("observables={}: mean total capacity {mean_total:.2}", set_name(set)));
    }
    write_csv(&out_dir.join("ipc_degrees.csv"), "observables,degree,realization,capacity", &rows)?;
    Ok(RunSummary { files: vec![PathBuf::from("ipc_degrees.csv")], notes })
}

/// Runtime invariant suites for the `invariants` CLI subcommand; each check
/// prints one PASS/FAIL line. Returns whether every check passed.
pub fn run_invariants(suite: &str) -> Result<bool> {
    let mut all = true;
    let mut check = |name: &str, result: Result<(f64, f64)>| match result {
        Ok((value, bound)) if value <= bound => {
            println!("PASS {name}: {value:.3e} <= {bound:.1e}");
        }
        Ok((value, bound)) => {
            println!("FAIL {name}: {value:.3e} > {bound:.1e}");
            all = false;
        }
        Err(e) => {
            println!("FAIL {name}: {e}");
            all = false;
        }
    };

    if matches!(suite, "spin" | "all") {
        let reservoir = SpinReservoir::new(SpinConfig { n_spins: 6, ..SpinConfig::default() })?;
        check(
            "spin propagator unitarity",
            Ok((reservoir.propagator().unitarity_error(), 1e-10)),
        );
        let mut state = reservoir.initial_state();
        for k in 0..100 {
            reservoir.step(&mut state, ((k * 31) % 97) as f64 / 96.0)?;
        }
        check("spin trace preservation", Ok(((state.trace() - 1.0).abs(), 1e-10)));
        check("spin hermiticity", Ok((state.hermiticity_error(), 1e-10)));
        check(
            "spin positivity",
            state.min_eigenvalue().map(|min| ((-min).max(0.0), 1e-9)),
        );
    }
    if matches!(suite, "gaussian" | "all") {
        let network = build_oscillator_network(&GaussianConfig::default())?;
        check("gaussian symplecticity", Ok((network.symplecticity_error(), 1e-10)));
        check(
            "gaussian flow determinant",
            network.determinant().map(|d| ((d - 1.0).abs(), 1e-8)),
        );
        let mut state = crate::gaussian::CovarianceState::ground(4);
        state.inject_mode(0, &squeezed_vacuum(2.0, 0.5)?)?;
        let evolved = network.apply(&state)?;
        check(
            "gaussian purity preservation",
            evolved.cov_determinant().map(|d| ((d / 0.5f64.powi(8) - 1.0).abs(), 1e-8)),
        );
        check(
            "gaussian uncertainty relation",
            evolved.uncertainty_margin().map(|m| ((-m).max(0.0), 1e-9)),
        );
    }
    if matches!(suite, "readout" | "all") {
        let x = ndarray::array![
            [0.3, 1.2, -0.5],
            [1.1, 0.4, 0.9],
            [-0.7, 0.8, 0.2],
            [0.5, -0.3, 1.4],
            [0.9, 0.1, -1.1],
            [0.2, 0.6, 0.3]
        ];
        let target: Vec<f64> = x.column(1).to_vec();
        let w = train_linear(&x, &target, 0.0)?;
        let y = predict(&x, &w)?;
        check(
            "readout realizable fit",
            nmse(y.as_slice().unwrap(), &target).map(|e| (e, 1e-12)),
        );
        let other = vec![1.0, -0.5, 0.3, 0.8, -1.2, 0.4];
        let direct = crate::readout::capacity(&x, &other)?;
        let basis = crate::readout::capacity_basis(&x)?;
        let projected = crate::readout::capacity_from_basis(&basis, &other)?;
        check("readout capacity route agreement", Ok(((direct - projected).abs(), 1e-10)));
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
        let text = std::fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap().to_string();
        let rows = lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        (header, rows)
    }

    fn tiny_timer_config() -> ExperimentConfig {
        ExperimentConfig::parse(
            "experiment.kind = timer\n\
             experiment.realizations = 2\n\
             experiment.washout = 20\n\
             spin.n_spins = 3\n\
             task.c = 30\n\
             task.tau = 2, 5\n\
             task.length = 80\n",
        )
        .unwrap()
    }

    #[test]
    fn timer_outputs_are_deterministic_and_self_consistent() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let config = tiny_timer_config();
        let summary = run_experiment(&config, dir_a.path()).unwrap();
        run_experiment(&config, dir_b.path()).unwrap();

        // byte-identical outputs across runs
        for file in &summary.files {
            let a = std::fs::read(dir_a.path().join(file)).unwrap();
            let b = std::fs::read(dir_b.path().join(file)).unwrap();
            assert_eq!(a, b, "{file:?} differs between runs");
        }

        // the mean column must equal the mean of the per-realization columns
        let (header, rows) = read_csv(&dir_a.path().join("trajectory_2_xyz_zz.csv"));
        assert!(header.starts_with("step,target,pred_0,pred_1,mean_prediction"));
        assert_eq!(rows.len(), 80 - 20);
        for row in &rows {
            let p0: f64 = row[2].parse().unwrap();
            let p1: f64 = row[3].parse().unwrap();
            let mean: f64 = row[4].parse().unwrap();
            assert!((mean - (p0 + p1) / 2.0).abs() <= 1e-12);
        }

        // aggregate NMSE rows recompute from per-realization rows
        let (_, rows) = read_csv(&dir_a.path().join("timer_nmse.csv"));
        for (tau, set) in [(2, "z"), (5, "xyz_zz")] {
            let group: Vec<&Vec<String>> = rows
                .iter()
                .filter(|r| r[0] == tau.to_string() && r[1] == set)
                .collect();
            assert_eq!(group.len(), 3);
            let per: Vec<f64> = group
                .iter()
                .filter(|r| r[2] != "mean")
                .map(|r| r[3].parse().unwrap())
                .collect();
            let mean: f64 = group.iter().find(|r| r[2] == "mean").unwrap()[3].parse().unwrap();
            assert!((mean - per.iter().sum::<f64>() / per.len() as f64).abs() <= 1e-12);
        }
    }

    #[test]
    fn classify_summary_shape_and_aggregates() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig::parse(
            "experiment.kind = classify\n\
             experiment.realizations = 2\n\
             task.n_classes = 2, 3\n\
             task.n_train = 40\n\
             task.n_test = 20\n",
        )
        .unwrap();
        run_experiment(&config, dir.path()).unwrap();
        let (header, rows) = read_csv(&dir.path().join("classify_summary.csv"));
        assert_eq!(header, "n_classes,realization,accuracy");
        // 2 class counts x (2 realizations + 1 mean row)
        assert_eq!(rows.len(), 6);
        for n_classes in [2, 3] {
            let group: Vec<f64> = rows
                .iter()
                .filter(|r| r[0] == n_classes.to_string() && r[1] != "mean")
                .map(|r| r[2].parse().unwrap())
                .collect();
            let mean: f64 = rows
                .iter()
                .find(|r| r[0] == n_classes.to_string() && r[1] == "mean")
                .unwrap()[2]
                .parse()
                .unwrap();
            assert!((mean - group.iter().sum::<f64>() / group.len() as f64).abs() <= 1e-12);
            assert!((0.0..=1.0).contains(&mean));
        }
        assert!(dir.path().join("meta.txt").exists());
    }

    #[test]
    fn ipc_csv_covers_all_sets_and_degrees() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig::parse(
            "experiment.kind = ipc\n\
             experiment.realizations = 1\n\
             experiment.washout = 10\n\
             spin.n_spins = 3\n\
             task.length = 300\n\
             task.d_max = 2\n\
             task.delay_max = 4\n",
        )
        .unwrap();
        run_experiment(&config, dir.path()).unwrap();
        let (header, rows) = read_csv(&dir.path().join("ipc_degrees.csv"));
        assert_eq!(header, "observables,degree,realization,capacity");
        // 3 sets x 2 degrees x (1 realization + 1 mean)
        assert_eq!(rows.len(), 12);
        for row in &rows {
            let cap: f64 = row[3].parse().unwrap();
            assert!(cap >= 0.0);
        }
        // larger observable sets cannot have lower retained linear memory by
        // much; at minimum every capacity is bounded by the feature count + 1
        for (set, bound) in [("z", 4.0), ("xyz", 10.0), ("xyz_zz", 13.0)] {
            for row in rows.iter().filter(|r| r[0] == set) {
                let cap: f64 = row[3].parse().unwrap();
                assert!(cap <= bound, "{set} degree {} capacity {cap}", row[1]);
            }
        }
    }

    #[test]
    fn subset_columns_respect_multiplex_blocks() {
        // one block of width 75 at n=10; z sits at 20..30
        let z = subset_columns(10, 1, ObservableSet::Z);
        assert_eq!(z, (20..30).collect::<Vec<_>>());
        let xyz = subset_columns(10, 2, ObservableSet::Xyz);
        assert_eq!(xyz.len(), 60);
        assert_eq!(xyz[0], 0);
        assert_eq!(xyz[30], 75);
        let full = subset_columns(4, 3, ObservableSet::XyzZz);
        assert_eq!(full, (0..54).collect::<Vec<_>>());
    }
}
