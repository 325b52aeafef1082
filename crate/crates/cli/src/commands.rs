use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use macc_core::experiment::{format_ratio, ratio_to_f64, tradeoff_point, BaseKind};
use macc_core::model::LibraryDocument;
use macc_core::verification::attack::{
    attack_sweep, attack_sweep_enumerated, default_attacker, two_cache_placement_leaks, AttackSummary,
};
use macc_core::verification::{DecodabilityReport, LibrarySet};
use macc_core::{
    algorithm1_private_set, is_private_set, private_set_bound, smallest_private_set_oracle, verify_decodability,
    verify_privacy_exact, CachingScheme, NetworkConfig, PrivacyOptions, PrivacyReport, PrivateSetMode, Rational,
    SchemeKind, SchemeRequest, SubfileLibrary,
};

use crate::args::{ExperimentConfig, RunArgs};
use crate::CliError;

const DECODE_SEEDS: u64 = 5;
const ATTACK_SEEDS: u64 = 3;

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(cfg: &ExperimentConfig, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    emit(cfg, &text)
}

fn load_library(path: &Path) -> Result<(NetworkConfig, SubfileLibrary), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(LibraryDocument::from_json(&text)?.into_library()?)
}

/// Memory at which a scheme is verified when no grid is given.
fn default_verify_memory(kind: SchemeKind, cfg: &ExperimentConfig) -> Rational {
    let n = cfg.n as i64;
    match kind {
        SchemeKind::Baseline => Rational::new(n, 2 * cfg.l as i64),
        SchemeKind::NonPrivate(BaseKind::Example1) | SchemeKind::Lifted(BaseKind::Example1) => Rational::new(n, 3),
        SchemeKind::NonPrivate(BaseKind::CyclicUncoded) | SchemeKind::Lifted(BaseKind::CyclicUncoded) => {
            Rational::new(n, cfg.k as i64)
        }
    }
}

#[derive(Serialize)]
struct VerifyPoint {
    scheme: String,
    /// Base memory for lifted schemes.
    requested_memory: String,
    memory: String,
    rate: String,
    private_set: Option<String>,
    decodability: DecodabilityReport,
    privacy: Option<PrivacyReport>,
    note: Option<String>,
    passed: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "N")]
    n: usize,
    seed: u64,
    expect_leak: bool,
    points: Vec<VerifyPoint>,
    passed: bool,
}

fn verify_point(
    cfg: &ExperimentConfig,
    kind: SchemeKind,
    memory: Rational,
    library: Option<&(NetworkConfig, SubfileLibrary)>,
) -> Result<VerifyPoint, CliError> {
    let mode = cfg.mode.unwrap_or_default();
    let request = |file_bits| SchemeRequest {
        kind,
        users: cfg.k,
        access: cfg.l,
        files: cfg.n,
        memory,
        file_bits,
        mode,
    };
    let minimal = request(None).config()?.file_bits();
    let decode_bits = library
        .map(|(c, _)| c.file_bits())
        .or(cfg.f)
        .unwrap_or(4 * minimal);
    let scheme = request(Some(decode_bits)).build()?;
    let scheme_cfg = *scheme.config();
    let (scheme_memory, scheme_rate) = (scheme.memory(), scheme.rate());
    let decode_library = match library {
        Some((_, lib)) => lib.resplit(scheme_cfg.subfiles_per_file())?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            SubfileLibrary::random(cfg.n, scheme_cfg.subfiles_per_file(), scheme_cfg.subfile_bits(), &mut rng)
        }
    };
    let seeds: Vec<u64> = (cfg.seed..cfg.seed + DECODE_SEEDS).collect();
    let decodability = verify_decodability(&scheme, &decode_library, &seeds)?;

    let check_privacy = kind.is_private() || cfg.expect_leak;
    let (privacy, note) = if check_privacy {
        let (target, libraries) = match library {
            Some(_) => (scheme, LibrarySet::Explicit(vec![decode_library])),
            None => (request(None).build()?, LibrarySet::All),
        };
        let options = PrivacyOptions {
            budget: cfg.budget,
            engine: cfg.engine,
            libraries,
            threads: cfg.threads.max(1),
        };
        (Some(verify_privacy_exact(&target, &options)?), None)
    } else {
        (
            None,
            Some(format!("{kind} is not demand-private; privacy check skipped (use --expect-leak to run it)")),
        )
    };

    let private = privacy.as_ref().map(PrivacyReport::is_private);
    let passed = decodability.passed
        && match (cfg.expect_leak, private) {
            (true, Some(p)) => !p,
            (false, Some(p)) => p,
            (_, None) => true,
        };
    Ok(VerifyPoint {
        scheme: kind.to_string(),
        requested_memory: format_ratio(&memory),
        memory: format_ratio(&scheme_memory),
        rate: format_ratio(&scheme_rate),
        private_set: matches!(kind, SchemeKind::Lifted(_)).then(|| mode.to_string()),
        decodability,
        privacy,
        note,
        passed,
    })
}

pub fn verify(run: &RunArgs) -> Result<u8, CliError> {
    let cfg = ExperimentConfig::resolve(run)?;
    let kind = cfg.single_scheme(SchemeKind::Lifted(BaseKind::Example1))?;
    let library = cfg.library.as_deref().map(load_library).transpose()?;
    if let Some((doc, _)) = &library {
        if (doc.users(), doc.access(), doc.files()) != (cfg.k, cfg.l, cfg.n) {
            return Err(CliError::Usage(format!(
                "library is for K={} L={} N={}, run is for K={} L={} N={}",
                doc.users(),
                doc.access(),
                doc.files(),
                cfg.k,
                cfg.l,
                cfg.n
            )));
        }
    }
    let grid = cfg
        .memory_grid
        .clone()
        .unwrap_or_else(|| vec![default_verify_memory(kind, &cfg)]);
    let points = grid
        .iter()
        .map(|&m| verify_point(&cfg, kind, m, library.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = points.iter().all(|p| p.passed);
    emit_json(
        &cfg,
        &VerifyReport {
            k: cfg.k,
            l: cfg.l,
            n: cfg.n,
            seed: cfg.seed,
            expect_leak: cfg.expect_leak,
            points,
            passed,
        },
    )?;
    Ok(if passed { 0 } else { 1 })
}

pub fn tradeoff(run: &RunArgs) -> Result<u8, CliError> {
    let cfg = ExperimentConfig::resolve(run)?;
    let schemes: Vec<SchemeKind> = match &cfg.schemes {
        Some(list) => list.clone(),
        None => SchemeKind::NAMES
            .iter()
            .map(|n| n.parse::<SchemeKind>().expect("known name"))
            .filter(|k| k.supports(cfg.k, cfg.l))
            .collect(),
    };
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["M_file_units", "rate_file_units", "q_overhead_bits", "scheme", "t"])
        .map_err(|e| CliError::Io(e.into()))?;
    let value = |r: &Rational| {
        if cfg.float {
            ratio_to_f64(r).to_string()
        } else {
            format_ratio(r)
        }
    };
    let mut rejected = 0;
    for kind in schemes {
        let mut grid = cfg
            .memory_grid
            .clone()
            .unwrap_or_else(|| kind.memory_grid(cfg.k, cfg.l, cfg.n));
        grid.sort();
        grid.dedup();
        for memory in grid {
            let request = SchemeRequest {
                kind,
                users: cfg.k,
                access: cfg.l,
                files: cfg.n,
                memory,
                file_bits: cfg.f,
                mode: cfg.mode.unwrap_or_default(),
            };
            match tradeoff_point(&request, cfg.seed) {
                Ok(row) => out
                    .write_record([
                        value(&row.memory),
                        value(&row.rate),
                        row.q_overhead_bits.to_string(),
                        row.scheme,
                        row.t.map(|t| t.to_string()).unwrap_or_default(),
                    ])
                    .map_err(|e| CliError::Io(e.into()))?,
                Err(e) => {
                    rejected += 1;
                    eprintln!("macc: rejected {kind} at M={}: {e}", format_ratio(&memory));
                }
            }
        }
    }
    let bytes = out.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    emit(&cfg, &String::from_utf8(bytes).expect("csv is utf-8"))?;
    Ok(if rejected == 0 { 0 } else { 2 })
}

#[derive(Serialize)]
struct SetSummary {
    caches: Vec<usize>,
    size: usize,
    is_private: bool,
}

#[derive(Serialize)]
struct PrivateSetReport {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    user: usize,
    algorithm1: SetSummary,
    bound: usize,
    oracle_size: usize,
    oracle_witness: Vec<usize>,
    bound_holds: bool,
}

pub fn private_set(run: &RunArgs) -> Result<u8, CliError> {
    let cfg = ExperimentConfig::resolve(run)?;
    if !(1 <= cfg.l && cfg.l < cfg.k && cfg.k <= 16) {
        return Err(CliError::Usage(format!(
            "private-set needs 1 <= L < K <= 16, got K={} L={}",
            cfg.k, cfg.l
        )));
    }
    let net = NetworkConfig::new(cfg.k, cfg.l, cfg.n.max(1), 1, 1)?;
    let alg = algorithm1_private_set(&net);
    let bound = private_set_bound(&net);
    let (t_star, witness) = smallest_private_set_oracle(&net)?;
    let report = PrivateSetReport {
        k: cfg.k,
        l: cfg.l,
        user: 1,
        algorithm1: SetSummary {
            is_private: is_private_set(&alg.caches, 1, &net)?,
            size: alg.size(),
            caches: alg.caches,
        },
        bound,
        oracle_size: t_star,
        oracle_witness: witness.caches,
        bound_holds: t_star <= bound,
    };
    emit_json(&cfg, &report)?;
    Ok(if report.bound_holds && report.algorithm1.is_private { 0 } else { 1 })
}

#[derive(Serialize)]
struct AttackReport {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "N")]
    n: usize,
    private_set: String,
    key_caches_of_target: Vec<usize>,
    /// Whether the two-cache key placement is fully visible to another user.
    flaw_expected: bool,
    sampled: AttackSummary,
    enumerated: Option<AttackSummary>,
    chance_rate: f64,
}

pub fn attack(run: &RunArgs, target: usize, attacker: Option<usize>) -> Result<u8, CliError> {
    let cfg = ExperimentConfig::resolve_with_network(run, (4, 3))?;
    let mode = cfg.mode.unwrap_or(PrivateSetMode::NaiveLwcc);
    let request = SchemeRequest {
        kind: SchemeKind::Lifted(BaseKind::CyclicUncoded),
        users: cfg.k,
        access: cfg.l,
        files: cfg.n,
        memory: Rational::new(cfg.n as i64, cfg.k as i64),
        file_bits: Some(cfg.f.unwrap_or(4 * cfg.k)),
        mode,
    };
    let scheme = request.build_lifted()?;
    let net = *scheme.config();
    net.check_user(target)?;
    let attacker = attacker.unwrap_or_else(|| default_attacker(&net, target));
    net.check_user(attacker)?;

    // Files must differ on the target's missing subfiles, otherwise a correct
    // reconstruction cannot name the file.
    let missing = scheme.missing_subfiles(target).to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let library = loop {
        let lib = SubfileLibrary::random(net.files(), net.subfiles_per_file(), net.subfile_bits(), &mut rng);
        let distinct = (1..=net.files()).all(|a| {
            (a + 1..=net.files()).all(|b| missing.iter().any(|&j| lib.subfile(a, j) != lib.subfile(b, j)))
        });
        if distinct {
            break lib;
        }
    };

    let seeds: Vec<u64> = (cfg.seed..cfg.seed + ATTACK_SEEDS).collect();
    let sampled = attack_sweep(&scheme, &library, target, attacker, &seeds)?;
    let enumerated = if scheme.shares() * net.files() <= 20 {
        Some(attack_sweep_enumerated(&scheme, &library, target, attacker, cfg.seed)?)
    } else {
        None
    };
    let report = AttackReport {
        k: net.users(),
        l: net.access(),
        n: net.files(),
        private_set: mode.to_string(),
        key_caches_of_target: scheme.family().set(target).caches.clone(),
        flaw_expected: two_cache_placement_leaks(&net),
        sampled,
        enumerated,
        chance_rate: 1.0 / net.files() as f64,
    };
    if !report.flaw_expected {
        eprintln!(
            "macc: L={} <= ceil(K/2)={}; the two-cache key placement is not exposed on this network",
            net.access(),
            net.users().div_ceil(2)
        );
    }
    emit_json(&cfg, &report)?;
    Ok(0)
}
