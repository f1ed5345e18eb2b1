use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use polarlist::channel::ChannelParams;
use polarlist::hwmodel::{HwConfig, HwReport};
use polarlist::sim::{run_sweep, write_csv, write_json, DecoderSpec, FrameDecoder, SimConfig, StopRule};
use polarlist::{ArithModel, Construction, PolarCode};

use crate::config::{parse_snrs, FerFile, HwFile, RunManifest, Snrs};
use crate::{usage, Arith, CodeArgs, ConstructArgs, DecodeArgs, FerArgs, HwArgs, Method};

/// A code given either by construction parameters or by a frozen-set file.
enum CodeSource {
    Built { len: usize, k: usize, construction: Construction },
    File(PathBuf),
}

impl CodeSource {
    fn from_args(a: &CodeArgs) -> anyhow::Result<Self> {
        if let Some(path) = &a.code {
            return Ok(CodeSource::File(path.clone()));
        }
        let (Some(len), Some(k)) = (a.n, a.k) else {
            return usage("give --n and --k, or --code FILE");
        };
        let construction = match a.method.unwrap_or(Method::Ga) {
            Method::Ga => {
                if a.eps.is_some() {
                    return usage("--eps applies to --method bec");
                }
                Construction::GaussianApprox {
                    design_ebn0_db: a.design_snr.unwrap_or(2.0),
                }
            }
            Method::Bec => {
                if a.design_snr.is_some() {
                    return usage("--design-snr applies to --method ga");
                }
                Construction::BhattacharyyaBec {
                    erasure_prob: a.eps.unwrap_or(0.5),
                }
            }
        };
        Ok(CodeSource::Built { len, k, construction })
    }

    fn build(&self) -> anyhow::Result<PolarCode> {
        match self {
            CodeSource::Built { len, k, construction } => Ok(PolarCode::construct(*len, *k, *construction)?),
            CodeSource::File(path) => {
                let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                PolarCode::read_frozen(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
            }
        }
    }
}

pub fn construct(args: &ConstructArgs) -> anyhow::Result<()> {
    let code = CodeSource::from_args(&args.code)?.build()?;
    match &args.out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            code.write_frozen(&mut w)?;
            w.flush()?;
            println!("K={} N={} R={} -> {}", code.k(), code.len(), code.rate(), path.display());
        }
        None => {
            print!("{}", code.to_frozen_string());
            eprintln!("K={} N={} R={}", code.k(), code.len(), code.rate());
        }
    }
    Ok(())
}

fn arith_model(arith: Arith, qch: Option<u32>) -> anyhow::Result<ArithModel> {
    match (arith, qch) {
        (Arith::Fixed, Some(qch)) => Ok(ArithModel::FixedPoint { qch }),
        (Arith::Fixed, None) => usage("--arith fixed needs --qch"),
        (_, Some(_)) => usage("--qch applies to --arith fixed"),
        (Arith::Exact, None) => Ok(ArithModel::ExactMinStar),
        (Arith::Approx, None) => Ok(ArithModel::ApproxMin),
    }
}

fn read_samples(path: &Path) -> anyhow::Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: f64 = tok
                .parse()
                .with_context(|| format!("{}:{}: bad value {tok:?}", path.display(), i + 1))?;
            out.push(v);
        }
    }
    Ok(out)
}

pub fn decode(args: &DecodeArgs) -> anyhow::Result<()> {
    let code = CodeSource::from_args(&args.code)?.build()?;
    let arith = arith_model(args.arith, args.qch)?;
    let spec = match args.list {
        Some(l) => DecoderSpec::list(l, arith),
        None => DecoderSpec::sc(arith),
    };
    spec.validate(&code)?;
    let params = match (args.ebn0, args.sigma) {
        (Some(db), None) => ChannelParams::from_ebn0_db(db, code.rate())?,
        (None, Some(sigma)) => ChannelParams::new(sigma)?,
        _ => return usage("give the channel as --ebn0 or --sigma"),
    };
    let y = read_samples(&args.input)?;
    if y.len() != code.len() {
        anyhow::bail!("{} holds {} values, code length is {}", args.input.display(), y.len(), code.len());
    }
    let u = spec.decode_frame(&code, &y, &params)?;
    let bits = if args.info { code.extract(&u) } else { u };
    let line: String = bits.iter().map(|&b| char::from(b'0' + b)).collect();
    println!("{line}");
    Ok(())
}

fn decoders(list: &[usize], sc: bool, arith: Option<Arith>, qch: &[u32], float_baseline: bool) -> anyhow::Result<Vec<DecoderSpec>> {
    let float = match arith {
        None | Some(Arith::Approx) => ArithModel::ApproxMin,
        Some(Arith::Exact) => ArithModel::ExactMinStar,
        Some(Arith::Fixed) => {
            if qch.is_empty() {
                return usage("--arith fixed needs --qch");
            }
            if float_baseline {
                return usage("--float-baseline needs a floating-point --arith");
            }
            ArithModel::ApproxMin
        }
    };
    if float_baseline && qch.is_empty() {
        return usage("--float-baseline applies with --qch");
    }
    let mut models = Vec::new();
    if qch.is_empty() || float_baseline {
        models.push(float);
    }
    models.extend(qch.iter().map(|&qch| ArithModel::FixedPoint { qch }));

    let mut specs = Vec::new();
    for &m in &models {
        if sc || list.is_empty() {
            specs.push(DecoderSpec::sc(m));
        }
        specs.extend(list.iter().map(|&l| DecoderSpec::list(l, m)));
    }
    Ok(specs)
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn fer(args: FerArgs, file: FerFile, seed: u64, jobs: Option<usize>) -> anyhow::Result<()> {
    let code_args = CodeArgs {
        n: pick(args.code.n, file.n),
        k: pick(args.code.k, file.k),
        method: pick(args.code.method, file.method),
        design_snr: pick(args.code.design_snr, file.design_snr),
        eps: pick(args.code.eps, file.eps),
        code: pick(args.code.code, file.code),
    };
    let source = CodeSource::from_args(&code_args)?;
    let code = source.build()?;
    let snrs = match (args.snrs, file.snrs) {
        (Some(s), _) | (None, Some(Snrs::Spec(s))) => parse_snrs(&s)?,
        (None, Some(Snrs::List(v))) => v,
        (None, None) => return usage("give --snrs"),
    };
    let list = if args.list.is_empty() { file.list.unwrap_or_default() } else { args.list };
    let qch = if args.qch.is_empty() { file.qch.unwrap_or_default() } else { args.qch };
    let specs = decoders(
        &list,
        args.sc || file.sc.unwrap_or(false),
        pick(args.arith, file.arith),
        &qch,
        args.float_baseline || file.float_baseline.unwrap_or(false),
    )?;
    let defaults = StopRule::default();
    let stop = StopRule {
        max_frames: pick(args.max_frames, file.max_frames).unwrap_or(defaults.max_frames),
        min_frame_errors: pick(args.min_errors, file.min_errors).unwrap_or(defaults.min_frame_errors),
    };
    let out_dir = pick(args.out_dir, file.out_dir).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    for spec in &specs {
        spec.validate(&code)?;
    }
    let construction = match &source {
        CodeSource::Built { construction, .. } => Some(*construction),
        CodeSource::File(_) => None,
    };
    for spec in specs {
        let sim = SimConfig {
            len: code.len(),
            k: code.k(),
            // frozen-set files carry no construction; the manifest records the path
            construction: construction.unwrap_or(Construction::GaussianApprox { design_ebn0_db: f64::NAN }),
            decoder: spec,
            ebn0_db: snrs.clone(),
            stop,
            seed,
        };
        sim.validate()?;
        let points = run_sweep(&code, &spec, &snrs, &stop, seed)?;

        let stem = out_dir.join(format!("fer-{}", spec.label()));
        let (csv, json, manifest) = (stem.with_extension("csv"), stem.with_extension("json"), stem.with_extension("manifest.json"));
        write_csv(&points, BufWriter::new(File::create(&csv).with_context(|| format!("creating {}", csv.display()))?))?;
        write_json(&points, BufWriter::new(File::create(&json).with_context(|| format!("creating {}", json.display()))?))?;
        let mut sim_json = serde_json::to_value(&sim)?;
        if let CodeSource::File(path) = &source {
            sim_json["construction"] = serde_json::json!({ "frozen_file": path });
        }
        let mut m = RunManifest::new(jobs, vec![csv.clone(), json.clone()]);
        m.sim = Some(sim_json);
        m.write(&manifest)?;

        println!("{}", spec.label());
        for p in &points {
            println!(
                "  {:>6.2} dB  frames {:>8}  errors {:>6}  FER {:.4e}  BER {:.4e}",
                p.ebn0_db, p.frames, p.frame_errors, p.fer, p.ber
            );
        }
    }
    Ok(())
}

pub fn hwreport(args: HwArgs, file: HwFile) -> anyhow::Result<()> {
    let cfg = HwConfig {
        len: pick(args.n, file.n).unwrap_or(1024),
        rate: pick(args.rate, file.rate).unwrap_or(0.5),
        list_size: pick(args.l, file.l).unwrap_or(2),
        pes: pick(args.p, file.p).unwrap_or(64),
        qch: pick(args.qch, file.qch).unwrap_or(3),
        f_clk: pick(args.fclk, file.fclk).unwrap_or(459e6),
    };
    let report = HwReport::new(&cfg)?;
    let text = if args.json || file.json.unwrap_or(false) {
        serde_json::to_string_pretty(&report)? + "\n"
    } else {
        report.to_text()
    };
    print!("{text}");
    if let Some(path) = &args.out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
        let mut m = RunManifest::new(None, vec![path.clone()]);
        m.hw = Some(&cfg);
        m.write(&path.with_extension("manifest.json"))?;
    }
    Ok(())
}
