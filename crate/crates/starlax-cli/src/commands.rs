//! Command definitions, dispatch and the text/LaTeX/JSON emitters.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser as ClapParser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use starlax::diffalg::{DiffPoly, Field};
use starlax::hirota::{
    dfay_relations, f_poly_terms_sorted, f_poly_text, kp_bilinear_residual, reparam_p_text,
    schur_polys, time_poly_terms_sorted, time_poly_text, ExpSum, FPoly, WaveVec,
};
use starlax::lax::{
    conserved_charge, lax_flow, nth_root, FlowOptions, FlowResult, LaxOperator,
};
use starlax::qcalc::{discrete_kp_map, q_commutator, BinomialConvention, QLaurent, QOperator};
use starlax::scalars::{QScalar, Rational};
use starlax::symbols::{
    bracket, product_by_name, star, Floor, PhaseSymbol, StarProduct,
};

use crate::parser::{parse_diffpoly, parse_qop, parse_symbol, CliError};

#[derive(ClapParser, Debug)]
#[command(name = "starlax", version, about = "Exact star-product symbol calculus and hierarchy flows")]
pub struct Cli {
    /// Output format for results.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Latex,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hierarchy flow right-hand sides d u_i / d t_k.
    Flow {
        /// Which monic operator drives the flow: kdv (p^2 + u) or kp.
        #[arg(long)]
        hierarchy: String,
        /// Flow index (a comma list computes several flows).
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u32>,
        /// Projection cut (keep p-exponents >= m); 0 is the standard flow.
        #[arg(long, default_value_t = 0)]
        m: i64,
        /// Deformed product driving the hierarchy.
        #[arg(long, default_value = "moyal")]
        kind: String,
        /// Divide the right-hand sides by the flow index.
        #[arg(long)]
        normalize: bool,
        /// Swap the bracket order (time reversal t_k -> -t_k).
        #[arg(long)]
        time_reversed: bool,
        /// Tracked tail coefficients for the kp operator.
        #[arg(long, default_value_t = 5)]
        kp_depth: u16,
        /// Compute independent flow indices on this many threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Monic n-th star root of a Lax symbol.
    Root {
        /// The operator, e.g. "p^2 + u".
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        /// Root order n (the symbol must be monic of this order).
        #[arg(long)]
        n: u32,
        /// Number of tail coefficients to determine.
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value = "moyal")]
        kind: String,
    },
    /// Deformed product of two symbol expressions.
    Star {
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
        #[arg(long, default_value = "moyal")]
        kind: String,
        /// Requested floor: an integer or "exact".
        #[arg(long, default_value = "exact", allow_hyphen_values = true)]
        floor: String,
    },
    /// Bracket (normalized antisymmetrized product) of two symbols.
    Bracket {
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
        #[arg(long, default_value = "moyal")]
        kind: String,
        #[arg(long, default_value = "exact", allow_hyphen_values = true)]
        floor: String,
    },
    /// Conserved-charge density Res(L^{k/n}).
    Charge {
        /// The operator, e.g. "p^2 + u".
        #[arg(long, default_value = "p^2 + u", allow_hyphen_values = true)]
        l: String,
        #[arg(long)]
        k: u32,
        /// Root depth (defaults to k + 2).
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long, default_value = "moyal")]
        kind: String,
    },
    /// Substitute k = 0 in a stored flow or symbol document.
    Limit {
        /// JSON file produced by flow/star/root/bracket.
        #[arg(long)]
        input: PathBuf,
    },
    /// Residual of the n-th bilinear hierarchy equation on a tau function.
    Hirota {
        #[arg(long)]
        n: u32,
        /// One-soliton spec "a=2,b=1/3,c=1".
        #[arg(long)]
        soliton: Option<String>,
        /// JSON file with explicit exponential-sum terms.
        #[arg(long)]
        tau_file: Option<PathBuf>,
    },
    /// Relations among the F_mn from the dispersionless Fay expansion.
    Dfay {
        #[arg(long)]
        order: u32,
        /// Re-express right-hand sides in P_{j+1} = F_1j / j.
        #[arg(long)]
        reparam_p: bool,
    },
    /// Elementary Schur polynomials p_0 ... p_N.
    Schur {
        #[arg(long = "N")]
        n: usize,
    },
    /// q-Leibniz expansion: generic formula (--n) or a concrete word (--word).
    Qleibniz {
        #[arg(long, allow_hyphen_values = true)]
        n: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
        /// Floor for negative dq powers: an integer or "exact".
        #[arg(long, default_value = "exact", allow_hyphen_values = true)]
        floor: String,
    },
    /// Commutator of two q-operator expressions, in normal form.
    Qcomm {
        #[arg(long, allow_hyphen_values = true)]
        lhs: String,
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
        #[arg(long, default_value = "exact", allow_hyphen_values = true)]
        floor: String,
    },
    /// Coefficient dictionary from the one-sided to the phase-space picture.
    MapSato {
        /// JSON array of differential-polynomial strings v_0, v_1, ...
        #[arg(long)]
        coeff_file: PathBuf,
    },
    /// Triangular discrete-hierarchy coefficient map.
    MapDkp {
        /// JSON array of Laurent-polynomial strings b_0, b_1, ...
        #[arg(long)]
        coeff_file: PathBuf,
        #[arg(long)]
        n: usize,
        /// Bracket reading: "q" (Gaussian binomial) or "ordinary".
        #[arg(long, default_value = "q")]
        bracket_convention: String,
    },
}

pub fn run(cli: Cli) -> Result<String, CliError> {
    let fmt = cli.format;
    match cli.command {
        Command::Flow { hierarchy, k, m, kind, normalize, time_reversed, kp_depth, jobs } => {
            cmd_flow(fmt, &hierarchy, &k, m, &kind, normalize, time_reversed, kp_depth, jobs)
        }
        Command::Root { l, n, depth, kind } => cmd_root(fmt, &l, n, depth, &kind),
        Command::Star { lhs, rhs, kind, floor } => cmd_product(fmt, &lhs, &rhs, &kind, &floor, false),
        Command::Bracket { lhs, rhs, kind, floor } => {
            cmd_product(fmt, &lhs, &rhs, &kind, &floor, true)
        }
        Command::Charge { l, k, depth, kind } => cmd_charge(fmt, &l, k, depth, &kind),
        Command::Limit { input } => cmd_limit(fmt, &input),
        Command::Hirota { n, soliton, tau_file } => cmd_hirota(fmt, n, soliton, tau_file),
        Command::Dfay { order, reparam_p } => cmd_dfay(fmt, order, reparam_p),
        Command::Schur { n } => cmd_schur(fmt, n),
        Command::Qleibniz { n, word, floor } => cmd_qleibniz(fmt, n, word, &floor),
        Command::Qcomm { lhs, rhs, floor } => cmd_qcomm(fmt, &lhs, &rhs, &floor),
        Command::MapSato { coeff_file } => cmd_map_sato(fmt, &coeff_file),
        Command::MapDkp { coeff_file, n, bracket_convention } => {
            cmd_map_dkp(fmt, &coeff_file, n, &bracket_convention)
        }
    }
}

fn product_of(kind: &str) -> Result<&'static dyn StarProduct, CliError> {
    product_by_name(kind).ok_or_else(|| {
        CliError::Parse(format!(
            "unknown product kind {kind:?} (registered: moyal, psdo-left)"
        ))
    })
}

fn floor_of(text: &str) -> Result<Floor, CliError> {
    if text == "exact" {
        return Ok(Floor::Exact);
    }
    text.parse::<i64>()
        .map(Floor::At)
        .map_err(|_| CliError::Parse(format!("bad floor {text:?} (integer or \"exact\")")))
}

// ---------------------------------------------------------------- symbols

fn floor_json(f: Floor) -> Value {
    match f {
        Floor::Exact => json!("exact"),
        Floor::At(m) => json!(m),
    }
}

fn symbol_json(s: &PhaseSymbol) -> Value {
    let mut terms = Vec::new();
    for (e, c) in s.iter().collect::<Vec<_>>().into_iter().rev() {
        terms.push(json!({ "p": e, "coeff": c.text() }));
    }
    json!({
        "schema": 1,
        "kind": "symbol",
        "floor": floor_json(s.floor()),
        "terms": terms,
        "text": s.text(),
    })
}

fn emit_symbol(fmt: OutputFormat, s: &PhaseSymbol) -> String {
    match fmt {
        OutputFormat::Text => s.text(),
        OutputFormat::Latex => s.latex(),
        OutputFormat::Json => symbol_json(s).to_string(),
    }
}

fn cmd_product(
    fmt: OutputFormat,
    lhs: &str,
    rhs: &str,
    kind: &str,
    floor: &str,
    is_bracket: bool,
) -> Result<String, CliError> {
    let product = product_of(kind)?;
    let a = parse_symbol(lhs, product)?;
    let b = parse_symbol(rhs, product)?;
    let want = floor_of(floor)?;
    let result = if is_bracket {
        bracket(product, &a, &b, want)?
    } else {
        star(product, &a, &b, want)?
    };
    Ok(emit_symbol(fmt, &result))
}

fn cmd_root(fmt: OutputFormat, l: &str, n: u32, depth: u32, kind: &str) -> Result<String, CliError> {
    let product = product_of(kind)?;
    let sym = parse_symbol(l, product)?;
    let lax = LaxOperator::new(n, sym, BTreeMap::new())?;
    let root = nth_root(product, &lax, depth)?;
    Ok(emit_symbol(fmt, &root))
}

fn cmd_charge(
    fmt: OutputFormat,
    l: &str,
    k: u32,
    depth: Option<u32>,
    kind: &str,
) -> Result<String, CliError> {
    let product = product_of(kind)?;
    let sym = parse_symbol(l, product)?;
    let order = sym
        .top()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Parse("operator must have a positive leading power".into()))?;
    let lax = LaxOperator::new(order as u32, sym, BTreeMap::new())?;
    let depth = depth.unwrap_or(k + 2);
    let density = conserved_charge(product, &lax, k, depth)?;
    Ok(match fmt {
        OutputFormat::Text => density.text(),
        OutputFormat::Latex => density.latex(),
        OutputFormat::Json => json!({
            "schema": 1,
            "kind": "charge",
            "k": k,
            "density": density.text(),
        })
        .to_string(),
    })
}

// ------------------------------------------------------------------ flows

fn field_name(f: Field) -> String {
    f.name()
}

fn flow_label_text(f: Field, k: u32) -> String {
    format!("{}_t{}", field_name(f), k)
}

fn flow_label_latex(f: Field, k: u32) -> String {
    match f {
        Field::U(0) => format!("u_{{t_{k}}}"),
        Field::U(i) => format!("u_{{{i},t_{k}}}"),
        Field::X => format!("x_{{t_{k}}}"),
    }
}

fn flow_text(fmt: OutputFormat, hierarchy: &str, flow: &FlowResult) -> String {
    match fmt {
        OutputFormat::Text => flow
            .rhs
            .iter()
            .map(|(f, p)| format!("{} = {}", flow_label_text(*f, flow.k), p.text()))
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::Latex => flow
            .rhs
            .iter()
            .map(|(f, p)| format!("{} = {}", flow_label_latex(*f, flow.k), p.latex()))
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::Json => {
            let mut rhs = serde_json::Map::new();
            for (f, p) in &flow.rhs {
                rhs.insert(field_name(*f), json!(p.text()));
            }
            json!({
                "schema": 1,
                "kind": "flow",
                "hierarchy": hierarchy,
                "k": flow.k,
                "m": flow.m,
                "rhs": Value::Object(rhs),
            })
            .to_string()
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_flow(
    fmt: OutputFormat,
    hierarchy: &str,
    ks: &[u32],
    m: i64,
    kind: &str,
    normalize: bool,
    time_reversed: bool,
    kp_depth: u16,
    jobs: usize,
) -> Result<String, CliError> {
    let product = product_of(kind)?;
    let operator = match hierarchy {
        "kdv" => LaxOperator::kdv(),
        "kp" => LaxOperator::kp(kp_depth),
        other => {
            return Err(CliError::Parse(format!(
                "unknown hierarchy {other:?} (expected kdv or kp)"
            )))
        }
    };
    let opts = FlowOptions { m, time_reversed, normalize };
    let compute = |k: u32| -> Result<FlowResult, CliError> {
        Ok(lax_flow(product, &operator, k, opts)?)
    };
    let flows: Vec<FlowResult> = if jobs > 1 && ks.len() > 1 {
        let results: Vec<Result<FlowResult, CliError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = ks.iter().map(|&k| scope.spawn(move || compute(k))).collect();
            handles.into_iter().map(|h| h.join().expect("flow thread")).collect()
        });
        results.into_iter().collect::<Result<_, _>>()?
    } else {
        ks.iter().map(|&k| compute(k)).collect::<Result<_, _>>()?
    };
    let blocks: Vec<String> = flows.iter().map(|f| flow_text(fmt, hierarchy, f)).collect();
    Ok(blocks.join("\n"))
}

// ------------------------------------------------------------------ limit

fn cmd_limit(fmt: OutputFormat, input: &PathBuf) -> Result<String, CliError> {
    let body = std::fs::read_to_string(input)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", input.display())))?;
    let doc: Value = serde_json::from_str(&body)
        .map_err(|e| CliError::Parse(format!("bad JSON in {}: {e}", input.display())))?;
    match doc.get("kind").and_then(Value::as_str) {
        Some("flow") => {
            let k = doc["k"].as_u64().unwrap_or(0) as u32;
            let m = doc["m"].as_i64().unwrap_or(0);
            let hierarchy = doc["hierarchy"].as_str().unwrap_or("kdv").to_string();
            let mut rhs = BTreeMap::new();
            let obj = doc["rhs"]
                .as_object()
                .ok_or_else(|| CliError::Parse("flow document without rhs".into()))?;
            for (name, value) in obj {
                let field = field_from_name(name)?;
                let poly = parse_diffpoly(
                    value
                        .as_str()
                        .ok_or_else(|| CliError::Parse("rhs entries must be strings".into()))?,
                )?;
                rhs.insert(field, poly.substitute_kappa(&Rational::zero()));
            }
            let flow = FlowResult { k, m, rhs };
            Ok(flow_text(fmt, &hierarchy, &flow))
        }
        Some("symbol") => {
            let text = doc["text"]
                .as_str()
                .ok_or_else(|| CliError::Parse("symbol document without text".into()))?;
            let sym = parse_symbol(text, &starlax::symbols::MOYAL)?;
            Ok(emit_symbol(fmt, &sym.substitute_kappa(&Rational::zero())))
        }
        _ => Err(CliError::Parse(
            "input must be a flow or symbol JSON document (kind field)".into(),
        )),
    }
}

fn field_from_name(name: &str) -> Result<Field, CliError> {
    if name == "u" {
        return Ok(Field::U(0));
    }
    if name == "x" {
        return Ok(Field::X);
    }
    if let Some(rest) = name.strip_prefix('u') {
        if let Ok(i) = rest.parse::<u16>() {
            return Ok(Field::U(i));
        }
    }
    Err(CliError::Parse(format!("unknown field name {name:?}")))
}

// ----------------------------------------------------------------- hirota

fn cmd_hirota(
    fmt: OutputFormat,
    n: u32,
    soliton: Option<String>,
    tau_file: Option<PathBuf>,
) -> Result<String, CliError> {
    if n < 2 {
        return Err(CliError::Parse("bilinear equations start at n = 2".into()));
    }
    let tau = match (soliton, tau_file) {
        (Some(spec), None) => soliton_tau(&spec, n + 1)?,
        (None, Some(path)) => tau_from_file(&path)?,
        _ => {
            return Err(CliError::Parse(
                "exactly one of --soliton or --tau-file is required".into(),
            ))
        }
    };
    let residual = kp_bilinear_residual(n, &tau);
    Ok(match fmt {
        OutputFormat::Text => format!("residual = {residual}"),
        OutputFormat::Latex => format!("\\text{{residual}} = {residual}"),
        OutputFormat::Json => json!({
            "schema": 1,
            "kind": "hirota",
            "n": n,
            "residual": residual.to_string(),
            "is_zero": residual.is_zero(),
        })
        .to_string(),
    })
}

fn soliton_tau(spec: &str, top: u32) -> Result<ExpSum, CliError> {
    let mut a = None;
    let mut b = None;
    let mut c = Some(Rational::one());
    for part in spec.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("bad soliton entry {part:?}")))?;
        let r: Rational = value
            .trim()
            .parse()
            .map_err(|e| CliError::Parse(format!("bad rational {value:?}: {e}")))?;
        match key.trim() {
            "a" => a = Some(r),
            "b" => b = Some(r),
            "c" => c = Some(r),
            other => return Err(CliError::Parse(format!("unknown soliton key {other:?}"))),
        }
    }
    let (a, b) = match (a, b) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(CliError::Parse("soliton spec needs a= and b=".into())),
    };
    if a == b {
        return Err(CliError::Parse("soliton parameters must satisfy a != b".into()));
    }
    Ok(ExpSum::one_soliton(&a, &b, &c.unwrap(), top))
}

fn tau_from_file(path: &PathBuf) -> Result<ExpSum, CliError> {
    let body = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&body)
        .map_err(|e| CliError::Parse(format!("bad JSON in {}: {e}", path.display())))?;
    let terms = doc["terms"]
        .as_array()
        .ok_or_else(|| CliError::Parse("tau document needs a terms array".into()))?;
    let mut tau = ExpSum::zero();
    for term in terms {
        let coeff: Rational = term["coeff"]
            .as_str()
            .ok_or_else(|| CliError::Parse("tau term without coeff".into()))?
            .parse()
            .map_err(|e| CliError::Parse(format!("bad coeff: {e}")))?;
        let mut wave = WaveVec::new();
        if let Some(obj) = term["wave"].as_object() {
            for (j, v) in obj {
                let idx: u32 = j
                    .parse()
                    .map_err(|_| CliError::Parse(format!("bad wave index {j:?}")))?;
                let r: Rational = v
                    .as_str()
                    .ok_or_else(|| CliError::Parse("wave entries must be strings".into()))?
                    .parse()
                    .map_err(|e| CliError::Parse(format!("bad wave value: {e}")))?;
                wave.insert(idx, r);
            }
        }
        tau = tau.add(&ExpSum::term(coeff, wave));
    }
    Ok(tau)
}

// ------------------------------------------------------------------- dfay

fn f_poly_json(p: &FPoly) -> Value {
    let mut terms = Vec::new();
    for (mono, coeff) in f_poly_terms_sorted(p) {
        let mut letters = Vec::new();
        for (&(m, n), &e) in mono {
            for _ in 0..e {
                letters.push(json!([m, n]));
            }
        }
        terms.push(json!([coeff.to_string(), { "F": letters }]));
    }
    json!(terms)
}

fn cmd_dfay(fmt: OutputFormat, order: u32, reparam_p: bool) -> Result<String, CliError> {
    let relations = dfay_relations(order).map_err(|e| CliError::Domain(e.to_string()))?;
    let canonical = relations.canonical();
    Ok(match fmt {
        OutputFormat::Text | OutputFormat::Latex => canonical
            .iter()
            .map(|r| {
                let rhs = if reparam_p {
                    reparam_p_text(&r.rhs)
                } else {
                    f_poly_text(&r.rhs)
                };
                format!("F_{{{},{}}} = {}", r.m, r.n, rhs)
            })
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::Json => {
            let rels: Vec<Value> = canonical
                .iter()
                .map(|r| {
                    json!({
                        "m": r.m,
                        "n": r.n,
                        "rhs": f_poly_json(&r.rhs),
                    })
                })
                .collect();
            json!({ "schema": 1, "kind": "dfay", "order": order, "relations": rels }).to_string()
        }
    })
}

// ------------------------------------------------------------------ schur

fn time_poly_latex(p: &starlax::hirota::TimePoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in time_poly_terms_sorted(p).into_iter().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = c.abs();
        let mut factors = Vec::new();
        if !mag.is_one() || m.is_empty() {
            factors.push(mag.latex());
        }
        for (&j, &e) in m.iter() {
            let letter = format!("t_{j}");
            if e == 1 {
                factors.push(letter);
            } else {
                factors.push(format!("{letter}^{e}"));
            }
        }
        out.push_str(&factors.join(" "));
    }
    out
}

fn cmd_schur(fmt: OutputFormat, n: usize) -> Result<String, CliError> {
    let polys = schur_polys(n);
    Ok(match fmt {
        OutputFormat::Text => polys
            .iter()
            .enumerate()
            .map(|(j, p)| format!("p_{j} = {}", time_poly_text(p)))
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::Latex => polys
            .iter()
            .enumerate()
            .map(|(j, p)| format!("p_{{{j}}} = {}", time_poly_latex(p)))
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::Json => {
            let entries: Vec<Value> = polys
                .iter()
                .enumerate()
                .map(|(j, p)| json!({ "j": j, "text": time_poly_text(p) }))
                .collect();
            json!({ "schema": 1, "kind": "schur", "polys": entries }).to_string()
        }
    })
}

// ------------------------------------------------------------------ qcalc

fn qscalar_text(c: &QScalar, latex: bool) -> String {
    if !latex || c.denominator().is_one() {
        return c.to_string();
    }
    format!("\\frac{{{}}}{{{}}}", c.numerator(), c.denominator())
}

/// The generic Leibniz expansion of `dq^n . u` for an abstract coefficient.
fn leibniz_formula(n: i64, floor: Floor, latex: bool) -> Result<String, CliError> {
    let (dq, tau) = if latex { ("\\partial_q", "\\tau") } else { ("dq", "T") };
    let k_hi: i64 = if n >= 0 {
        n
    } else {
        match floor {
            Floor::Exact => {
                return Err(CliError::Domain(
                    "negative dq power expands into an infinite tail; a finite floor is required"
                        .into(),
                ))
            }
            Floor::At(f) => n - f,
        }
    };
    // positive n prints the pure-derivative word first; negative n follows
    // the expansion order of its defining series (shallowest word first)
    let order: Vec<i64> = if n >= 0 {
        (0..=k_hi).rev().collect()
    } else {
        (0..=k_hi).collect()
    };
    let mut parts = Vec::new();
    for k in order {
        let coeff = QScalar::q_binomial(n, k as u32);
        if coeff.is_zero() {
            continue;
        }
        let shift = n - k;
        let inner = if k == 0 {
            "u".to_string()
        } else if k == 1 {
            format!("{dq} u")
        } else {
            format!("{dq}^{k} u")
        };
        let shifted = match shift {
            0 => {
                if k == 0 {
                    inner.clone()
                } else {
                    format!("({inner})")
                }
            }
            1 => format!("{tau}({inner})"),
            s => format!("{tau}^{s}({inner})"),
        };
        let trailing = match shift {
            0 => String::new(),
            1 => format!(" {dq}"),
            s => format!(" {dq}^{s}"),
        };
        let lead = if coeff.is_one() {
            String::new()
        } else {
            let body = qscalar_text(&coeff, latex);
            if body.contains(' ') || body.contains('+') || body.contains('-') {
                format!("({body}) ")
            } else {
                format!("{body} ")
            }
        };
        parts.push(format!("{lead}{shifted}{trailing}"));
    }
    Ok(parts.join(" + "))
}

fn qop_text(op: &QOperator, latex: bool) -> String {
    if !latex {
        return op.to_string();
    }
    op.to_string()
        .replace("dq", "\\partial_q")
        .replace('T', "\\tau")
}

fn qop_json(op: &QOperator) -> Value {
    let mut words = Vec::new();
    let mut sorted: Vec<((i64, i64), &QLaurent)> = op.iter().collect();
    sorted.sort_by(|((a1, b1), _), ((a2, b2), _)| b2.cmp(b1).then(a2.cmp(a1)));
    for ((tau, dq), coeff) in sorted {
        words.push(json!({ "coeff": coeff.to_string(), "shift": tau, "dq": dq }));
    }
    json!({
        "schema": 1,
        "kind": "qoperator",
        "floor": floor_json(op.floor()),
        "words": words,
        "text": op.to_string(),
    })
}

fn cmd_qleibniz(
    fmt: OutputFormat,
    n: Option<i64>,
    word: Option<String>,
    floor: &str,
) -> Result<String, CliError> {
    let want = floor_of(floor)?;
    match (n, word) {
        (Some(n), None) => {
            let latex = fmt == OutputFormat::Latex;
            let text = leibniz_formula(n, want, latex)?;
            Ok(match fmt {
                OutputFormat::Json => json!({
                    "schema": 1,
                    "kind": "qleibniz",
                    "n": n,
                    "text": leibniz_formula(n, want, false)?,
                })
                .to_string(),
                _ => text,
            })
        }
        (None, Some(expr)) => {
            let op = parse_qop(&expr, want)?;
            Ok(match fmt {
                OutputFormat::Text => op.to_string(),
                OutputFormat::Latex => qop_text(&op, true),
                OutputFormat::Json => qop_json(&op).to_string(),
            })
        }
        _ => Err(CliError::Parse("exactly one of --n or --word is required".into())),
    }
}

fn cmd_qcomm(fmt: OutputFormat, lhs: &str, rhs: &str, floor: &str) -> Result<String, CliError> {
    let want = floor_of(floor)?;
    let a = parse_qop(lhs, want)?;
    let b = parse_qop(rhs, want)?;
    let c = q_commutator(&a, &b, want)?;
    Ok(match fmt {
        OutputFormat::Text => c.to_string(),
        OutputFormat::Latex => qop_text(&c, true),
        OutputFormat::Json => qop_json(&c).to_string(),
    })
}

// ------------------------------------------------------------------- maps

fn string_list_from_file(path: &PathBuf) -> Result<Vec<String>, CliError> {
    let body = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&body)
        .map_err(|e| CliError::Parse(format!("bad JSON in {}: {e}", path.display())))?;
    let arr = doc
        .as_array()
        .or_else(|| doc.get("coeffs").and_then(Value::as_array))
        .ok_or_else(|| CliError::Parse("expected a JSON array of coefficient strings".into()))?;
    arr.iter()
        .map(|v| {
            v.as_str()
                .map(String::from)
                .ok_or_else(|| CliError::Parse("coefficients must be strings".into()))
        })
        .collect()
}

fn cmd_map_sato(fmt: OutputFormat, coeff_file: &PathBuf) -> Result<String, CliError> {
    let strings = string_list_from_file(coeff_file)?;
    let v: Vec<DiffPoly> = strings
        .iter()
        .map(|s| parse_diffpoly(s))
        .collect::<Result<_, _>>()?;
    let u = starlax::lax::sato_to_moyal(&v);
    Ok(match fmt {
        OutputFormat::Text => u
            .iter()
            .enumerate()
            .map(|(n, p)| format!("u_{n} = {}", p.text()))
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::Latex => u
            .iter()
            .enumerate()
            .map(|(n, p)| format!("u_{{{n}}} = {}", p.latex()))
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::Json => {
            let coeffs: Vec<Value> = u.iter().map(|p| json!(p.text())).collect();
            json!({ "schema": 1, "kind": "map-sato", "coeffs": coeffs }).to_string()
        }
    })
}

fn cmd_map_dkp(
    fmt: OutputFormat,
    coeff_file: &PathBuf,
    n: usize,
    convention: &str,
) -> Result<String, CliError> {
    let convention = match convention {
        "q" => BinomialConvention::QBracket,
        "ordinary" => BinomialConvention::Ordinary,
        other => {
            return Err(CliError::Parse(format!(
                "unknown bracket convention {other:?} (q or ordinary)"
            )))
        }
    };
    let strings = string_list_from_file(coeff_file)?;
    let b: Vec<QLaurent> = strings
        .iter()
        .map(|s| qlaurent_from_expr(s))
        .collect::<Result<_, _>>()?;
    let a = discrete_kp_map(&b, n, convention)?;
    Ok(match fmt {
        OutputFormat::Text | OutputFormat::Latex => a
            .iter()
            .enumerate()
            .map(|(i, f)| format!("a_{i} = {f}"))
            .collect::<Vec<_>>()
            .join("\n"),
        OutputFormat::Json => {
            let coeffs: Vec<Value> = a.iter().map(|f| json!(f.to_string())).collect();
            json!({ "schema": 1, "kind": "map-dkp", "n": n, "coeffs": coeffs }).to_string()
        }
    })
}

fn qlaurent_from_expr(src: &str) -> Result<QLaurent, CliError> {
    let op = parse_qop(src, Floor::Exact)?;
    let mut words = op.iter();
    match (words.next(), words.next()) {
        (None, _) => Ok(QLaurent::zero()),
        (Some(((0, 0), c)), None) => Ok(c.clone()),
        _ => Err(CliError::Parse(format!(
            "expected a Laurent polynomial in x and q, found operator letters in {src:?}"
        ))),
    }
}
