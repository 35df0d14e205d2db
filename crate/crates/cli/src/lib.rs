//! Command implementations behind the `orbgpd` binary.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! code with the captured stdout/stderr, so the commands can be tested
//! without spawning a process.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use orbigroupoid::gmor::{
    are_morita_equivalent, is_strong_equivalence, is_weak_equivalence, morita_signature, MoritaSignature,
    WeakEquivalence,
};
use orbigroupoid::gpd::orbits_and_isotropy;
use orbigroupoid::inertia::{inertia_decomposition, loop_space};
use orbigroupoid::io::{self, DocError, LoadedGroupoid};
use orbigroupoid::orbmodel::{wps_effective, wps_strata, WeightVector};
use orbigroupoid::vbun::{ch_deloc, ch_deloc_rank_check, k_rank, InertiaSectors, Tolerances};
use orbigroupoid::{Error, Groupoid, GroupoidHom, VectorBundle64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;
pub const EXIT_CAPABILITY: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "orbgpd", version, about = "Finite groupoid models of orbifolds")]
pub struct Cli {
    /// Entrywise tolerance for group laws and projector identities.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_structural: f64,
    /// Singular-value cutoff for numerical rank.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_rank: f64,
    /// Largest codomain handled by the strong-equivalence and span searches.
    #[arg(long, global = true, default_value_t = 8)]
    pub search_bound: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Orbits, isotropy, Morita signature and K-rank of a groupoid.
    Analyze { input: PathBuf },
    /// Loop space, inertia orbits and, for actions, the centralizer decomposition.
    Inertia { input: PathBuf },
    /// Weak and strong equivalence of a homomorphism document.
    Weq { input: PathBuf },
    /// Morita equivalence of two groupoids.
    Morita { left: PathBuf, right: PathBuf },
    /// Delocalised Chern character of a bundle.
    Chdeloc { groupoid: PathBuf, bundle: PathBuf },
    /// Invariant sections of a bundle.
    Sections { groupoid: PathBuf, bundle: PathBuf },
    /// Singular strata of a weighted projective space.
    Wps {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        weights: Vec<u64>,
    },
}

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Partial report still worth printing, e.g. a failed rank check.
    pub report: Option<Value>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into(), report: None }
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        let code = match &e {
            DocError::Syntax { .. } | DocError::Schema { .. } => EXIT_PARSE,
            DocError::Invalid { .. } => EXIT_VALIDATION,
            DocError::Core(c) => return c.clone().into(),
        };
        Failure::new(code, e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) => EXIT_PARSE,
            Error::Invariant(_) => EXIT_VALIDATION,
            Error::Numerical(_) => EXIT_NUMERICAL,
            Error::Capability(_) => EXIT_CAPABILITY,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = std::result::Result<Value, Failure>;

/// Named groupoids loaded so far, plus the numerical settings.
#[derive(Debug)]
pub struct Workspace {
    groupoids: BTreeMap<String, Arc<Groupoid>>,
    pub tolerances: Tolerances<f64>,
    pub search_bound: usize,
}

impl Workspace {
    pub fn new(tolerances: Tolerances<f64>, search_bound: usize) -> Self {
        Self { groupoids: BTreeMap::new(), tolerances, search_bound }
    }

    fn read(path: &Path) -> std::result::Result<Value, Failure> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
        io::parse_text(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
    }

    /// Loads a groupoid document and registers it under its `"name"` field
    /// or, failing that, the file stem.
    pub fn load_groupoid(&mut self, path: &Path) -> std::result::Result<LoadedGroupoid, Failure> {
        let doc = Self::read(path)?;
        let body = doc.get("groupoid").unwrap_or(&doc);
        let loaded = io::groupoid_from_json(body, "$").map_err(|e| located(path, e))?;
        let name = doc
            .get("name")
            .and_then(Value::as_str)
            .map(str::to_string)
            .unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
        self.register(name, loaded.groupoid.clone())?;
        Ok(loaded)
    }

    pub fn register(&mut self, name: String, g: Arc<Groupoid>) -> std::result::Result<(), Failure> {
        if self.groupoids.contains_key(&name) {
            return Err(Failure::new(EXIT_PARSE, format!("name \"{name}\" is already registered")));
        }
        self.groupoids.insert(name, g);
        Ok(())
    }

    pub fn groupoid(&self, name: &str) -> Option<&Arc<Groupoid>> {
        self.groupoids.get(name)
    }

    /// Loads a bundle whose `"base"` names a registered groupoid, holds an
    /// inline groupoid document, or is absent when exactly one groupoid is
    /// registered.
    pub fn load_bundle(&mut self, path: &Path) -> std::result::Result<VectorBundle64, Failure> {
        let doc = Self::read(path)?;
        let base = match doc.get("base") {
            Some(Value::String(name)) => self
                .groupoid(name)
                .cloned()
                .ok_or_else(|| Failure::new(EXIT_PARSE, format!("{}: unknown base \"{name}\"", path.display())))?,
            Some(inline) => io::groupoid_from_json(inline, "$.base").map_err(|e| located(path, e))?.groupoid,
            None if self.groupoids.len() == 1 => self.groupoids.values().next().cloned().expect("one entry"),
            None => return Err(Failure::new(EXIT_PARSE, format!("{}: bundle has no base", path.display()))),
        };
        let e: VectorBundle64 = io::bundle_from_json(&doc, "$", base).map_err(|e| located(path, e))?;
        e.validate(self.tolerances.structural)
            .map_err(|v| Failure::new(EXIT_VALIDATION, format!("{}: {v}", path.display())))?;
        Ok(e)
    }
}

fn located(path: &Path, e: DocError) -> Failure {
    let mut f = Failure::from(e);
    f.message = format!("{}: {}", path.display(), f.message);
    f
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return Outcome { code, stdout, stderr };
        }
    };
    match execute(&cli) {
        Ok(v) => Outcome {
            code: EXIT_OK,
            stdout: serde_json::to_string_pretty(&v).expect("json values serialise") + "\n",
            stderr: String::new(),
        },
        Err(f) => Outcome {
            code: f.code,
            stdout: f
                .report
                .map(|v| serde_json::to_string_pretty(&v).expect("json values serialise") + "\n")
                .unwrap_or_default(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

pub fn execute(cli: &Cli) -> CmdResult {
    let tolerances = Tolerances { structural: cli.tol_structural, rank: cli.tol_rank, eigen: cli.tol_rank };
    let mut ws = Workspace::new(tolerances, cli.search_bound);
    match &cli.command {
        Command::Analyze { input } => cmd_analyze(&mut ws, input),
        Command::Inertia { input } => cmd_inertia(&mut ws, input),
        Command::Weq { input } => cmd_weq(&mut ws, input),
        Command::Morita { left, right } => cmd_morita(&mut ws, left, right),
        Command::Chdeloc { groupoid, bundle } => cmd_chdeloc(&mut ws, groupoid, bundle),
        Command::Sections { groupoid, bundle } => cmd_sections(&mut ws, groupoid, bundle),
        Command::Wps { weights } => cmd_wps(weights),
    }
}

fn signature_json(s: &MoritaSignature) -> Value {
    Value::Array(
        s.entries.iter().map(|e| json!({"label": e.label, "order": e.order, "multiplicity": e.multiplicity})).collect(),
    )
}

pub fn cmd_analyze(ws: &mut Workspace, input: &Path) -> CmdResult {
    let g = ws.load_groupoid(input)?.groupoid;
    let od = orbits_and_isotropy(&g);
    Ok(json!({
        "objects": g.num_objects(),
        "arrows": g.num_arrows(),
        "orbits": od.orbits.len(),
        "isotropy": od.isotropy_orders(),
        "morita_signature": signature_json(&morita_signature(&g)?),
        "k_rank": k_rank(&g),
    }))
}

pub fn cmd_inertia(ws: &mut Workspace, input: &Path) -> CmdResult {
    let loaded = ws.load_groupoid(input)?;
    let g = loaded.groupoid;
    let sectors = InertiaSectors::new(&g);
    let mut out = Map::new();
    out.insert("loops".into(), json!(loop_space(&g).len()));
    out.insert("inertia_orbits".into(), json!(sectors.count()));
    out.insert("k_rank".into(), json!(k_rank(&g)));
    match &loaded.action {
        Some(a) => {
            let d = inertia_decomposition(a)?;
            let comps: Vec<Value> = d
                .components
                .iter()
                .map(|c| {
                    json!({
                        "representative": c.representative,
                        "centralizer_order": c.centralizer.order(),
                        "fixed_points": c.fixed_points,
                    })
                })
                .collect();
            out.insert("components".into(), Value::Array(comps));
            out.insert("sectors".into(), json!(d.sector_count()));
            let status = if d.certificate.is_weak() { "verified" } else { "failed" };
            out.insert("certificate".into(), json!(status));
        }
        None => {
            out.insert("components".into(), Value::Null);
            out.insert("certificate".into(), json!("not_applicable"));
        }
    }
    Ok(Value::Object(out))
}

/// Homomorphism documents:
/// `{"dom", "cod", "hom": {"obj_map", "arr_map"}}`,
/// `{"localisation": {"groupoid", "cover"}}` or `{"identity": <groupoid>}`.
fn load_hom(ws: &mut Workspace, input: &Path) -> std::result::Result<GroupoidHom, Failure> {
    let doc = Workspace::read(input)?;
    let at = |e| located(input, e);
    if let Some(loc) = doc.get("localisation") {
        let g = io::groupoid_from_json(loc.get("groupoid").unwrap_or(&Value::Null), "$.localisation.groupoid")
            .map_err(at)?;
        let cover: Vec<Vec<usize>> = serde_json::from_value(loc.get("cover").cloned().unwrap_or(Value::Null))
            .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: at $.localisation.cover: {e}", input.display())))?;
        return io::localisation_projection(&g.groupoid, &cover).map_err(at);
    }
    if let Some(g) = doc.get("identity") {
        let g = io::groupoid_from_json(g, "$.identity").map_err(at)?;
        return Ok(GroupoidHom::identity(g.groupoid));
    }
    let dom = io::groupoid_from_json(doc.get("dom").unwrap_or(&Value::Null), "$.dom").map_err(at)?;
    let cod = io::groupoid_from_json(doc.get("cod").unwrap_or(&Value::Null), "$.cod").map_err(at)?;
    let hom = doc.get("hom").unwrap_or(&doc);
    let f = io::hom_from_json(hom, "$.hom", dom.groupoid.clone(), cod.groupoid.clone()).map_err(at)?;
    ws.register("dom".into(), dom.groupoid)?;
    ws.register("cod".into(), cod.groupoid)?;
    Ok(f)
}

pub fn cmd_weq(ws: &mut Workspace, input: &Path) -> CmdResult {
    let f = load_hom(ws, input)?;
    let mut out = Map::new();
    match is_weak_equivalence(&f) {
        WeakEquivalence::Verified { .. } => {
            out.insert("weak".into(), json!(true));
            let strong = match is_strong_equivalence(&f, ws.search_bound) {
                Ok(Some(_)) => json!(true),
                Ok(None) => json!(false),
                Err(Error::Capability(_)) => json!("bound_exceeded"),
                Err(e) => return Err(e.into()),
            };
            out.insert("strong".into(), strong);
            out.insert("certificate".into(), json!("verified"));
        }
        WeakEquivalence::NotEssentiallySurjective { object } => {
            out.insert("weak".into(), json!(false));
            out.insert("strong".into(), json!(false));
            out.insert("missing_object".into(), json!(object));
        }
        WeakEquivalence::NotFullyFaithful { pair, dom_arrows, cod_arrows } => {
            out.insert("weak".into(), json!(false));
            out.insert("strong".into(), json!(false));
            out.insert("failing_pair".into(), json!([pair.0, pair.1]));
            out.insert("arrow_counts".into(), json!([dom_arrows, cod_arrows]));
        }
    }
    Ok(Value::Object(out))
}

pub fn cmd_morita(ws: &mut Workspace, left: &Path, right: &Path) -> CmdResult {
    let g = ws.load_groupoid(left)?.groupoid;
    let h = io::groupoid_from_json(&Workspace::read(right)?, "$").map_err(|e| located(right, e))?.groupoid;
    let v = are_morita_equivalent(&g, &h)?;
    let span = v.span.as_ref().map(|s| {
        json!({
            "skeleton_objects": s.skeleton.num_objects(),
            "left_weak": is_weak_equivalence(&s.left).is_weak(),
            "right_weak": is_weak_equivalence(&s.right).is_weak(),
        })
    });
    Ok(json!({
        "equivalent": v.equivalent,
        "left_signature": signature_json(&v.left_signature),
        "right_signature": signature_json(&v.right_signature),
        "span": span,
    }))
}

pub fn cmd_chdeloc(ws: &mut Workspace, groupoid: &Path, bundle: &Path) -> CmdResult {
    let g = ws.load_groupoid(groupoid)?.groupoid;
    let e = ws.load_bundle(bundle)?;
    let tol = ws.tolerances;
    let sectors = InertiaSectors::new(&g);
    let values = ch_deloc(&e, &sectors, tol.structural)?;
    let good = e.is_good(tol.structural);
    let rc = ch_deloc_rank_check(&g, &tol)?;
    let mut check = json!({"rank": rc.rank, "expected": rc.inertia_orbits, "k_rank": rc.k_rank, "pass": rc.pass});
    if !rc.pass {
        let rows: Vec<Value> = (0..rc.matrix.rows())
            .map(|i| Value::Array((0..rc.matrix.cols()).map(|j| io::complex_to_json(rc.matrix[(i, j)])).collect()))
            .collect();
        check["matrix"] = Value::Array(rows);
    }
    let report = json!({
        "values": io::values_to_json(&values.values),
        "good": good.good,
        "bad_loops": good.witnesses.iter().map(|w| w.arrow).collect::<Vec<_>>(),
        "invariant_section_dim": e.invariant_sections(tol.rank).dimension,
        "rank_check": check,
    });
    if !rc.pass {
        let mut f = Failure::new(
            EXIT_NUMERICAL,
            format!("rank check failed: rank {} for {} inertia orbits", rc.rank, rc.inertia_orbits),
        );
        f.report = Some(report);
        return Err(f);
    }
    Ok(report)
}

pub fn cmd_sections(ws: &mut Workspace, groupoid: &Path, bundle: &Path) -> CmdResult {
    ws.load_groupoid(groupoid)?;
    let e = ws.load_bundle(bundle)?;
    let s = e.invariant_sections(ws.tolerances.rank);
    let basis: Vec<Value> = s
        .basis
        .iter()
        .map(|sec| {
            let mut m = Map::new();
            for (x, v) in sec.iter().enumerate() {
                m.insert(x.to_string(), Value::Array(v.iter().map(|&z| io::complex_to_json(z)).collect()));
            }
            Value::Object(m)
        })
        .collect();
    Ok(json!({
        "dimension": s.dimension,
        "averaged_trace": io::real_to_json(e.averaged_trace()),
        "basis": basis,
    }))
}

pub fn cmd_wps(weights: &[u64]) -> CmdResult {
    let w = WeightVector::new(weights.to_vec())?;
    let strata: Vec<Value> = wps_strata(&w)
        .into_iter()
        .map(|s| json!({"support": s.support, "order": s.order, "merged": s.merged}))
        .collect();
    Ok(json!({"weights": w.weights(), "effective": wps_effective(&w), "strata": strata}))
}
