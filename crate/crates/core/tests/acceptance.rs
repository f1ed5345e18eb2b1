//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` still run at full tolerance and
//! print FAIL when they fail; they do not change the exit status. Any other
//! failure exits with status 1.

mod common;

use std::collections::BTreeSet;
use std::io::Cursor;
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use polarlist::channel::ChannelParams;
use polarlist::hwmodel::{
    coded_throughput, decode_cycles, ll_storage_bits, ll_storage_bits_sum, pointer_bits, HwConfig,
};
use polarlist::listdec::ReferenceListDecoder;
use polarlist::sim::{run_sweep, snr_at_fer, write_csv, DecoderSpec, FerPoint, StopRule};
use polarlist::{
    ArithModel, Construction, FixedPoint, Kernel, ListDecoder, LlPair, MinApprox, MinStar, PolarCode, ScDecoder,
};
use rand::Rng;

const KNOWN_FAILURES: &[u32] = &[7];
const GOLDEN: &str = include_str!("data/frozen_n1024_k512_ga2db.txt");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn golden() -> PolarCode {
    PolarCode::read_frozen(Cursor::new(GOLDEN)).unwrap()
}

fn test_code(len: usize) -> PolarCode {
    if len == 1024 {
        golden()
    } else {
        PolarCode::construct(len, len / 2, Construction::GaussianApprox { design_ebn0_db: 2.0 }).unwrap()
    }
}

/// Noisy frame at a random Eb/N0 in [0, 4) dB.
fn random_frame(code: &PolarCode, rng: &mut rand_chacha::ChaCha8Rng) -> (Vec<f64>, ChannelParams) {
    let params = ChannelParams::from_ebn0_db(rng.random_range(0.0..4.0), code.rate()).unwrap();
    (noisy_frame(code, &params, rng).y, params)
}

const FRAMES: usize = 10_000;

fn sc_reduction() -> Outcome {
    let mut rng = rng(101);
    let mut mismatches = 0;
    for n in [3usize, 6, 10] {
        let code = test_code(1 << n);
        let fx = FixedPoint::new(3, n).unwrap();
        let (mut sa, mut se, mut sf) = (ScDecoder::new(MinApprox, n), ScDecoder::new(MinStar, n), ScDecoder::new(fx, n));
        let mut la = ListDecoder::new(MinApprox, n, 1).unwrap();
        let mut le = ListDecoder::new(MinStar, n, 1).unwrap();
        let mut lf = ListDecoder::new(fx, n, 1).unwrap();
        for _ in 0..FRAMES {
            let (y, params) = random_frame(&code, &mut rng);
            let ll = scaled_lls(&y, &params);
            let q = quantized_lls(&y, &params, 3);
            mismatches += usize::from(la.decode(&code, &ll).unwrap().u != sa.decode(&code, &ll));
            mismatches += usize::from(le.decode(&code, &ll).unwrap().u != se.decode(&code, &ll));
            mismatches += usize::from(lf.decode(&code, &q).unwrap().u != sf.decode(&code, &q));
        }
    }
    outcome(
        mismatches == 0,
        format!("{mismatches} mismatches over 3 lengths x 3 models x {FRAMES} frames"),
    )
}

fn pointer_vs_copy_one<K: Kernel + Clone>(
    kernel: K,
    code: &PolarCode,
    list_size: usize,
    lls: &[Vec<LlPair<K::Value>>],
) -> usize {
    let n = code.n();
    let mut a = ListDecoder::new(kernel.clone(), n, list_size).unwrap();
    let mut b = ReferenceListDecoder::new(kernel, n, list_size).unwrap();
    a.set_trace(true);
    b.set_trace(true);
    let mut bad = 0;
    for ll in lls {
        let same_out = a.decode(code, ll).unwrap() == b.decode(code, ll).unwrap();
        let (ta, tb) = (a.take_trace(), b.take_trace());
        let same_trace = ta.len() == tb.len() && ta.iter().zip(&tb).all(|(x, y)| x.same_decisions(y));
        bad += usize::from(!(same_out && same_trace));
    }
    bad
}

fn pointer_vs_copy() -> Outcome {
    let mut rng = rng(102);
    let mut bad = 0;
    let mut runs = 0;
    for n in [3usize, 6, 10] {
        let code = test_code(1 << n);
        let mut float = Vec::with_capacity(FRAMES);
        let mut fixed = Vec::with_capacity(FRAMES);
        for _ in 0..FRAMES {
            let (y, params) = random_frame(&code, &mut rng);
            float.push(scaled_lls(&y, &params));
            fixed.push(quantized_lls(&y, &params, 3));
        }
        for list_size in [2usize, 4] {
            bad += pointer_vs_copy_one(MinApprox, &code, list_size, &float);
            bad += pointer_vs_copy_one(MinStar, &code, list_size, &float);
            bad += pointer_vs_copy_one(FixedPoint::new(3, n).unwrap(), &code, list_size, &fixed);
            runs += 3;
        }
    }
    outcome(
        bad == 0,
        format!("{bad} output or trace mismatches over {runs} configurations x {FRAMES} frames"),
    )
}

fn ml_oracle() -> Outcome {
    let mut rng = rng(103);
    let code = PolarCode::construct(8, 4, Construction::GaussianApprox { design_ebn0_db: 1.0 }).unwrap();
    let params = ChannelParams::from_ebn0_db(1.0, code.rate()).unwrap();
    let mut dec = ListDecoder::new(MinStar, 3, 16).unwrap();
    let (mut metric_bad, mut word_bad, mut ties) = (0, 0, 0);
    let mut worst = 0.0f64;
    for _ in 0..FRAMES {
        let f = noisy_frame(&code, &params, &mut rng);
        let ll = full_lls(&f.y, &params);
        let out = dec.decode(&code, &ll).unwrap();
        let ml = ml_metrics(&code, &ll);
        let diff = (out.metric - ml[0].1).abs();
        worst = worst.max(diff);
        metric_bad += usize::from(diff >= 1e-9);
        if (ml[1].1 - ml[0].1).abs() < 1e-9 {
            ties += 1;
        } else {
            word_bad += usize::from(code.extract(&out.u) != ml[0].0);
        }
    }
    outcome(
        metric_bad == 0 && word_bad == 0,
        format!("max |metric - ML| = {worst:.2e}, {metric_bad} metric and {word_bad} codeword mismatches, {ties} ties"),
    )
}

/// Every value a stage can hold, given any values at the stage above.
fn reachable_sets(fx: &FixedPoint) -> Vec<BTreeSet<(u64, u64)>> {
    let n = fx.n();
    let top = (1u64 << fx.qch()) - 1;
    let mut sets = vec![BTreeSet::new(); n + 1];
    sets[n] = (0..=top).flat_map(|a| (0..=top).map(move |b| (a, b))).collect();
    for s in (0..n).rev() {
        let above: Vec<LlPair<u64>> = sets[s + 1].iter().map(|&(a, b)| LlPair::new(a, b)).collect();
        let mut next = BTreeSet::new();
        for &a in &above {
            for &b in &above {
                for out in [fx.f(a, b, s), fx.g(a, b, 0, s), fx.g(a, b, 1, s)] {
                    next.insert((out.v0, out.v1));
                }
            }
        }
        sets[s] = next;
    }
    sets
}

fn no_overflow() -> Outcome {
    let n = 3;
    let fx = FixedPoint::new(3, n).unwrap();
    let sets = reachable_sets(&fx);
    let mut detail = Vec::new();
    let mut pass = true;
    for (s, set) in sets.iter().enumerate() {
        let max = set.iter().map(|&(a, b)| a.max(b)).max().unwrap();
        pass &= max <= fx.max_value(s);
        detail.push(format!("s{s} max {max} < 2^{}", fx.stage_width(s).unwrap()));
    }

    // full decodes with a kernel that asserts every write
    let checked = CheckedFixed(fx);
    let mut rng = rng(104);
    let top = (1u64 << fx.qch()) - 1;
    let decodes = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        for _ in 0..20_000 {
            let code = random_code(8, rng.random_range(1..=8), &mut rng);
            let ch: Vec<LlPair<u64>> = (0..8)
                .map(|_| LlPair::new(rng.random_range(0..=top), rng.random_range(0..=top)))
                .collect();
            ScDecoder::new(checked, n).decode(&code, &ch);
            for list_size in [2usize, 4, 8] {
                ListDecoder::new(checked, n, list_size).unwrap().decode(&code, &ch).unwrap();
            }
        }
    }));
    pass &= decodes.is_ok();
    outcome(
        pass,
        format!("{}; 80000 checked decodes {}", detail.join(", "), if decodes.is_ok() { "clean" } else { "overflowed" }),
    )
}

fn sweep(code: &PolarCode, dec: DecoderSpec, snrs: &[f64], seed: u64) -> Vec<FerPoint> {
    let stop = StopRule {
        max_frames: 100_000,
        min_frame_errors: 100,
    };
    let t = Instant::now();
    let pts = run_sweep(code, &dec, snrs, &stop, seed).unwrap();
    eprintln!("  {:<16} {:>6.1}s  {}", dec.label(), t.elapsed().as_secs_f64(), describe(&pts));
    pts
}

fn describe(pts: &[FerPoint]) -> String {
    pts.iter()
        .map(|p| format!("{:.1}dB:{:.2e}({})", p.ebn0_db, p.fer, p.frames))
        .collect::<Vec<_>>()
        .join(" ")
}

fn not_worse(a: &FerPoint, b: &FerPoint) -> bool {
    a.fer <= b.fer + 2.0 * (a.stderr_fer.powi(2) + b.stderr_fer.powi(2)).sqrt()
}

const SNRS: [f64; 4] = [1.5, 2.0, 2.5, 3.0];

fn crossing(pts: &[FerPoint]) -> f64 {
    snr_at_fer(pts, 1e-2).unwrap_or(f64::NAN)
}

fn fer_curves(sc: &[FerPoint], l2: &[FerPoint], l4: &[FerPoint]) -> Outcome {
    let ordered = (0..SNRS.len()).all(|i| not_worse(&l4[i], &l2[i]) && not_worse(&l2[i], &sc[i]));
    let gain = crossing(sc) - crossing(l2);
    outcome(
        ordered && gain >= 0.1,
        format!(
            "ordering {}; SC reaches 1e-2 at {:.3} dB, L=2 at {:.3} dB, gain {gain:.3} dB (need >= 0.1)",
            if ordered { "holds" } else { "violated" },
            crossing(sc),
            crossing(l2)
        ),
    )
}

fn approximation(code: &PolarCode) -> Outcome {
    let stop = StopRule {
        max_frames: 100_000,
        min_frame_errors: 0,
    };
    // independent noise per model, as the combined standard error assumes
    let run = |arith, seed| run_sweep(code, &DecoderSpec::list(2, arith), &[2.0], &stop, seed).unwrap()[0].clone();
    let (exact, approx) = (run(ArithModel::ExactMinStar, 106), run(ArithModel::ApproxMin, 206));
    let se = (exact.stderr_fer.powi(2) + approx.stderr_fer.powi(2)).sqrt();
    let diff = (exact.fer - approx.fer).abs();
    outcome(
        diff < 2.0 * se,
        format!(
            "exact {:.4e} vs approx {:.4e} over {} frames, |diff| {diff:.2e} vs 2 SE {:.2e}",
            exact.fer,
            approx.fer,
            exact.frames,
            2.0 * se
        ),
    )
}

fn quantization(float: &[FerPoint], q3: &[FerPoint], q4: &[FerPoint]) -> Outcome {
    let base = crossing(float);
    let (g3, g4) = (crossing(q3) - base, crossing(q4) - base);
    outcome(
        g3.abs() <= 0.1 && g4.abs() <= 0.05,
        format!("float L=2 reaches 1e-2 at {base:.3} dB; Q_ch=3 gap {g3:.3} dB (limit 0.1), Q_ch=4 gap {g4:.3} dB (limit 0.05)"),
    )
}

fn hardware() -> Outcome {
    let cfg = |list_size, f_clk| HwConfig {
        len: 1024,
        rate: 0.5,
        list_size,
        pes: 64,
        qch: 3,
        f_clk,
    };
    let cycles = decode_cycles(&cfg(2, 459e6)).unwrap();
    let tp2 = coded_throughput(&cfg(2, 459e6)).unwrap() / 1e6;
    let tp4 = coded_throughput(&cfg(4, 314e6)).unwrap() / 1e6;
    let (p2, p4) = (pointer_bits(&cfg(2, 0.0)), pointer_bits(&cfg(4, 0.0)));
    let mut sums_agree = true;
    let mut swept = 0;
    for n in 2..=15 {
        for list_size in [1, 2, 4, 8] {
            for qch in 3..=6 {
                let c = HwConfig {
                    len: 1 << n,
                    qch,
                    ..cfg(list_size, 0.0)
                };
                sums_agree &= ll_storage_bits(&c) == ll_storage_bits_sum(&c);
                swept += 1;
            }
        }
    }
    let pass = cycles == 2592.0
        && (tp2 - 181.4).abs() <= 1.0
        && (tp4 - 124.1).abs() <= 1.0
        && (p2, p4) == (18, 72)
        && sums_agree;
    outcome(
        pass,
        format!(
            "{cycles} cycles, {tp2:.2} / {tp4:.2} Mbps, pointer bits {p2} / {p4}, B_LL forms agree on {swept} configs: {sums_agree}"
        ),
    )
}

fn determinism() -> Outcome {
    let code = test_code(256);
    let dec = DecoderSpec::list(2, ArithModel::FixedPoint { qch: 4 });
    let stop = StopRule {
        max_frames: 3000,
        min_frame_errors: 40,
    };
    let csv_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let pts = pool.install(|| run_sweep(&code, &dec, &[1.0, 2.0, 3.0], &stop, 109).unwrap());
        let mut out = Vec::new();
        write_csv(&pts, &mut out).unwrap();
        out
    };
    let base = csv_with(1);
    let same = [2usize, 4, 7].iter().all(|&t| csv_with(t) == base);
    outcome(same, format!("{} CSV bytes, identical for 1, 2, 4 and 7 threads: {same}", base.len()))
}

fn main() -> ExitCode {
    let code = golden();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut record = |id, name, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        eprintln!("  criterion {id} took {:.1}s", t.elapsed().as_secs_f64());
        println!("criterion {id} ({name}): {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };

    record(1, "list size 1 equals SC", &sc_reduction);
    record(2, "pointer memory equals copying", &pointer_vs_copy);
    record(3, "full list is ML", &ml_oracle);
    record(4, "fixed point never overflows", &no_overflow);

    let float = |l| DecoderSpec::list(l, ArithModel::ApproxMin);
    let sc = sweep(&code, DecoderSpec::sc(ArithModel::ApproxMin), &SNRS, 105);
    let l2 = sweep(&code, float(2), &SNRS, 105);
    let l4 = sweep(&code, float(4), &SNRS, 105);
    record(5, "FER ordering and list gain", &|| fer_curves(&sc, &l2, &l4));
    record(6, "min approximation is lossless", &|| approximation(&code));
    let fixed = |qch| DecoderSpec::list(2, ArithModel::FixedPoint { qch });
    let q3 = sweep(&code, fixed(3), &SNRS, 105);
    let q4 = sweep(&code, fixed(4), &SNRS, 105);
    record(7, "quantization loss", &|| quantization(&l2, &q3, &q4));
    record(8, "hardware model", &hardware);
    record(9, "thread-count determinism", &determinism);

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    let unexpected: Vec<u32> = failed.iter().copied().filter(|id| !KNOWN_FAILURES.contains(id)).collect();
    println!(
        "acceptance: {}/{} passed; known failures {:?}; unexpected failures {:?}",
        results.len() - failed.len(),
        results.len(),
        KNOWN_FAILURES,
        unexpected
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
