//! The statistical adversary harness: run a concrete attack strategy many
//! times and report empirical verification-pass rates with confidence
//! intervals.
//!
//! The only strategy implemented is `measure-all`: the adversary measures
//! every ciphertext qubit in the computational basis (learning the data
//! positions) and then submits an honest deletion certificate. Hadamard
//! check positions collapse, so the pass rate is `2^-w` for the BB84-based
//! schemes and `(3/4)^p` averaged over the secret basis string in the CSS
//! variant.

use std::io::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use cefe::base::{lwe_keygen, ske_keygen, Qrom};
use cefe::bits::BitVec;
use cefe::cd::{css, onetime, qrom, BackendEncKey};
use cefe::qsim::MeasureBasis;
use cefe::stats::binomial_ci95;

use crate::profiles::ProfileKind;
use crate::util::{Args, CliResult, Failure};

#[derive(Clone, Copy, PartialEq, Eq)]
enum AttackScheme {
    Cd,
    CeskQrom,
    CepkQrom,
    CeskCss,
    CepkCss,
}

impl AttackScheme {
    fn parse(name: &str) -> CliResult<Self> {
        match name {
            "cd" => Ok(Self::Cd),
            "cesk-qrom" => Ok(Self::CeskQrom),
            "cepk-qrom" => Ok(Self::CepkQrom),
            "cesk-css" => Ok(Self::CeskCss),
            "cepk-css" => Ok(Self::CepkCss),
            other => Err(Failure::usage(format!(
                "unknown attack scheme {other:?} (cd, cesk-qrom, cepk-qrom, cesk-css, cepk-css)"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Cd => "cd",
            Self::CeskQrom => "cesk-qrom",
            Self::CepkQrom => "cepk-qrom",
            Self::CeskCss => "cesk-css",
            Self::CepkCss => "cepk-css",
        }
    }
}

/// One adversarial trial; returns whether verification still accepted.
fn run_trial(scheme: AttackScheme, rng: &mut ChaCha12Rng, oracle: &mut Qrom) -> bool {
    match scheme {
        AttackScheme::Cd => {
            // w = 8 Hadamard checks over an 8-bit message.
            let key = onetime::keygen(16, 8, rng).unwrap();
            let m = BitVec::random(8, rng);
            let mut ct = onetime::enc(&key, &m).unwrap();
            let _ = ct.measure_all(MeasureBasis::Computational, rng).unwrap();
            let cert = onetime::del(ct, rng).unwrap();
            onetime::vrfy(&key, &cert).unwrap()
        }
        AttackScheme::CeskQrom | AttackScheme::CepkQrom => {
            let profile = cefe::cd::qrom::QromProfile::test_profile();
            let m = BitVec::random(8, rng);
            let (vk, mut ct) = match scheme {
                AttackScheme::CeskQrom => {
                    let sk = ske_keygen(16, rng);
                    qrom::enc(BackendEncKey::Ske(&sk), profile, &m, oracle, rng).unwrap()
                }
                _ => {
                    let (pk, _sk) =
                        lwe_keygen(cefe::base::LweParams::test_profile(), rng).unwrap();
                    qrom::enc(BackendEncKey::Pke(&pk), profile, &m, oracle, rng).unwrap()
                }
            };
            let _ = ct
                .quantum
                .measure_all(MeasureBasis::Computational, rng)
                .unwrap();
            let cert = qrom::del(ct, rng).unwrap();
            qrom::vrfy(&vk, &cert).unwrap()
        }
        AttackScheme::CeskCss | AttackScheme::CepkCss => {
            let profile = ProfileKind::Desk.css();
            let m = BitVec::random(1, rng);
            let (vk, mut ct) = match scheme {
                AttackScheme::CeskCss => {
                    let sk = ske_keygen(16, rng);
                    css::enc(BackendEncKey::Ske(&sk), &profile, &m, rng).unwrap()
                }
                _ => {
                    let (pk, _sk) =
                        lwe_keygen(cefe::base::LweParams::test_profile(), rng).unwrap();
                    css::enc(BackendEncKey::Pke(&pk), &profile, &m, rng).unwrap()
                }
            };
            let _ = ct
                .quantum
                .measure_all(MeasureBasis::Computational, rng)
                .unwrap();
            css::vrfy(&vk, css::del(ct), rng).unwrap()
        }
    }
}

fn expected_rate(scheme: AttackScheme) -> (f64, &'static str) {
    match scheme {
        AttackScheme::Cd | AttackScheme::CeskQrom | AttackScheme::CepkQrom => {
            (2f64.powi(-8), "2^-8 (w = 8 collapsed checks)")
        }
        AttackScheme::CeskCss | AttackScheme::CepkCss => {
            ((3f64 / 4f64).powi(7), "(3/4)^7 (p = 7, basis averaged)")
        }
    }
}

pub fn cmd_attack(args: &Args) -> CliResult<()> {
    let scheme_name = args
        .positional
        .first()
        .ok_or_else(|| Failure::usage("attack needs a scheme argument"))?;
    let scheme = AttackScheme::parse(scheme_name)?;
    let strategy = args.flag("strategy").unwrap_or("measure-all");
    if strategy != "measure-all" {
        return Err(Failure::usage(format!(
            "unknown strategy {strategy:?} (only measure-all is implemented)"
        )));
    }
    let trials: u64 = args.parse_flag("trials", 10_000)?;
    if trials == 0 {
        return Err(Failure::usage("--trials must be positive"));
    }
    let seed: u64 = args.parse_flag("seed", 0xCEFE)?;
    let threads: usize = args.parse_flag("threads", 1)?;
    let threads = threads.clamp(1, 64);

    // Fan trials across workers, each with an independently derived seed.
    let per = trials / threads as u64;
    let mut handles = Vec::new();
    for worker in 0..threads {
        let n = if worker == threads - 1 {
            trials - per * (threads as u64 - 1)
        } else {
            per
        };
        handles.push(std::thread::spawn(move || {
            let mut rng = ChaCha12Rng::seed_from_u64(seed ^ (0x9E3779B9u64 * (worker as u64 + 1)));
            let mut oracle = Qrom::new(64, seed.wrapping_add(worker as u64));
            let mut passes = 0u64;
            for _ in 0..n {
                if run_trial(scheme, &mut rng, &mut oracle) {
                    passes += 1;
                }
            }
            passes
        }));
    }
    let passes: u64 = handles.into_iter().map(|h| h.join().unwrap()).sum();

    let rate = passes as f64 / trials as f64;
    let (lo, hi) = binomial_ci95(passes, trials);
    let (expect, expect_desc) = expected_rate(scheme);
    println!("attack report");
    println!("  scheme:   {}", scheme.name());
    println!("  strategy: {strategy}");
    println!("  trials:   {trials}");
    println!("  passes:   {passes}");
    println!("  rate:     {rate:.6}");
    println!("  ci95:     [{lo:.6}, {hi:.6}]");
    println!("  expected: {expect:.6} ({expect_desc})");
    if let Some(path) = args.flag("csv") {
        let mut f = std::fs::File::create(path)
            .map_err(|e| Failure::usage(format!("cannot create {path}: {e}")))?;
        writeln!(f, "strategy,trials,passes,rate,ci_low,ci_high")
            .and_then(|_| writeln!(f, "{strategy},{trials},{passes},{rate:.6},{lo:.6},{hi:.6}"))
            .map_err(|e| Failure::usage(format!("cannot write {path}: {e}")))?;
        println!("  csv:      {path}");
    }
    Ok(())
}

/// Quick self-contained check used by `selftest`: honest deletion always
/// verifies under the same flows the attack exercises.
pub fn honest_pass_rate(scheme_name: &str, trials: u64, seed: u64) -> CliResult<f64> {
    let scheme = AttackScheme::parse(scheme_name)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut oracle = Qrom::new(64, seed);
    let mut passes = 0u64;
    for _ in 0..trials {
        let ok = match scheme {
            AttackScheme::Cd => {
                let key = onetime::keygen(16, 8, &mut rng).unwrap();
                let m = BitVec::random(8, &mut rng);
                let ct = onetime::enc(&key, &m).unwrap();
                let cert = onetime::del(ct, &mut rng).unwrap();
                onetime::vrfy(&key, &cert).unwrap()
            }
            _ => {
                let sk = ske_keygen(16, &mut rng);
                let profile = cefe::cd::qrom::QromProfile::test_profile();
                let m = BitVec::random(8, &mut rng);
                let (vk, ct) = qrom::enc(
                    BackendEncKey::Ske(&sk),
                    profile,
                    &m,
                    &mut oracle,
                    &mut rng,
                )
                .unwrap();
                let cert = qrom::del(ct, &mut rng).unwrap();
                qrom::vrfy(&vk, &cert).unwrap()
            }
        };
        if ok {
            passes += 1;
        }
    }
    Ok(passes as f64 / trials as f64)
}
