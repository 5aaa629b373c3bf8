use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use lamtree::basischange::{cancellation_bound, cheap_bound, AutomorphismFile};
use lamtree::freewords::enumerate::rays as enumerate_rays;
use lamtree::freewords::{Basis, Leaf, Ray};
use lamtree::laminations::{
    compare, default_schedule, l_epsilon_language_with, l_infinity_language, l_omega_language_with,
    omega_enumerate_with, LaminaryLanguage, LanguageFile, Provenance, DEFAULT_LIMIT_BUDGET,
};
use lamtree::qmap::{l1_test, q_fibers, q_leaf_language, q_pair_by_language, q_pair_test, L1Verdict, QPairVerdict};
use lamtree::treemodels::TreeModel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{JobConfig, Params, Task};
use crate::models::{load_automorphism, load_model, LimitSettings, Model};
use crate::report::{preview, table, Report};

/// A ray as written in files: `prefix · period^∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayEntry {
    #[serde(default)]
    pub prefix: String,
    pub period: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RayFile {
    pub basis: String,
    pub rays: Vec<RayEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafEntry {
    pub left: RayEntry,
    pub right: RayEntry,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LeafFile {
    pub basis: String,
    pub leaves: Vec<LeafEntry>,
}

impl RayEntry {
    pub fn from_ray(basis: &Basis, r: &Ray) -> RayEntry {
        RayEntry {
            prefix: basis.format_word(r.prefix()),
            period: basis.format_word(r.period()),
        }
    }

    pub fn to_ray(&self, basis: &Basis) -> Result<Ray> {
        Ok(Ray::new(
            &basis.parse_word(&self.prefix)?,
            &basis.parse_word(&self.period)?,
        )?)
    }

    /// `prefix (period)^inf` for tables.
    pub fn display(&self) -> String {
        if self.prefix.is_empty() {
            format!("({})^inf", self.period)
        } else {
            format!("{} ({})^inf", self.prefix, self.period)
        }
    }

    /// `PREFIX|PERIOD`, or just `PERIOD`.
    pub fn parse_inline(s: &str) -> RayEntry {
        match s.split_once('|') {
            Some((p, v)) => RayEntry {
                prefix: p.trim().into(),
                period: v.trim().into(),
            },
            None => RayEntry {
                prefix: String::new(),
                period: s.trim().into(),
            },
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn check_basis(file_basis: &str, model: &Basis) -> Result<Basis> {
    let b = Basis::parse(file_basis)?;
    if !b.compatible(model) {
        bail!("file basis {b} does not match the model basis {model}");
    }
    Ok(model.clone())
}

fn load_rays(path: &Path, basis: &Basis) -> Result<Vec<Ray>> {
    let f: RayFile = read_json(path)?;
    let b = check_basis(&f.basis, basis)?;
    f.rays.iter().map(|r| r.to_ray(&b)).collect()
}

fn load_leaves(path: &Path, basis: &Basis) -> Result<Vec<Leaf>> {
    let f: LeafFile = read_json(path)?;
    let b = check_basis(&f.basis, basis)?;
    f.leaves
        .iter()
        .map(|l| Ok(Leaf::new(l.left.to_ray(&b)?, l.right.to_ray(&b)?)?))
        .collect()
}

/// Everything a job needs besides its own configuration.
#[derive(Clone, Debug)]
pub struct Env {
    pub defaults: Params,
    pub cache_dir: Option<std::path::PathBuf>,
}

struct Outcome {
    result: serde_json::Value,
    flags: BTreeSet<String>,
    notes: Vec<String>,
    table: String,
}

impl Outcome {
    fn new(result: serde_json::Value, table: String) -> Outcome {
        Outcome {
            result,
            flags: BTreeSet::new(),
            notes: Vec::new(),
            table,
        }
    }

    fn with_provenance(mut self, p: &Provenance) -> Outcome {
        self.flags.extend(p.flags.iter().cloned());
        self
    }
}

/// Runs one job with the environment defaults under its own parameters.
pub fn run_job(job: &JobConfig, env: &Env) -> Result<Report> {
    let params = env.defaults.overlay(&job.params);
    params.validate()?;
    let limit = LimitSettings {
        k_max: params.kmax.unwrap_or(lamtree::limittrees::DEFAULT_KMAX),
        tol: params.tol.unwrap_or(lamtree::limittrees::DEFAULT_TOL),
        cache_dir: env.cache_dir.clone(),
    };
    // caches touched by the job, checked for problems once it is done
    let caches = std::cell::RefCell::new(Vec::new());
    let load = |reference: &str| -> Result<Model> {
        let m = load_model(reference, &limit)?;
        caches.borrow_mut().extend(m.cache.clone());
        Ok(m)
    };
    let outcome = match &job.task {
        Task::Length { model, word } => length(&load(model)?, word)?,
        Task::Omega { model } => omega(&load(model)?, &params)?,
        Task::Lang { model } => lang(&load(model)?, &params)?,
        Task::Recurrent { model, rays } => recurrent(&load(model)?, rays.as_deref(), &params)?,
        Task::Compare { left, right } => compare_files(left, right)?,
        Task::L1 { model, rays, ray } => l1(&load(model)?, rays.as_deref(), ray, &params)?,
        Task::Qpair {
            model,
            leaves,
            language,
        } => qpair(&load(model)?, leaves.as_deref(), language.as_deref(), &params)?,
        Task::Bcc { automorphism } => bcc(automorphism, &params)?,
    };
    for cache in caches.borrow().iter() {
        for w in cache.warnings() {
            eprintln!("warning: {w}");
        }
    }
    let echoed = JobConfig {
        name: job.name.clone(),
        task: job.task.clone(),
        params,
    };
    Ok(Report::new(
        echoed,
        outcome.result,
        outcome.flags,
        outcome.notes,
        outcome.table,
    ))
}

fn length(m: &Model, word: &str) -> Result<Outcome> {
    let t = &m.tree;
    let b = t.basis();
    let w = b.parse_word(word)?;
    let dec = w
        .cyclic_decompose()
        .map_err(|_| anyhow!("the identity has no translation length"))?;
    let tl = lamtree::treemodels::length_of(t.as_ref(), &w)?;
    let disp = t.displacement(&w);
    let mut o = Outcome::new(
        json!({
            "model": t.model_id(),
            "word": b.format_word(&w),
            "conjugator": b.format_word(&dec.conjugator),
            "core": b.format_word(&dec.core),
            "translation_length": tl,
            "displacement": disp,
            "exact": t.is_exact(),
        }),
        table(&[
            ("model", t.model_id()),
            ("word", b.format_word(&w)),
            ("conjugator", b.format_word(&dec.conjugator)),
            ("core", b.format_word(&dec.core)),
            ("translation length", tl.render()),
            ("displacement", disp.render()),
        ]),
    );
    if !tl.converged() || !disp.converged() {
        o.flags.insert("unconverged".into());
    }
    Ok(o)
}

fn budget(t: &dyn TreeModel, params: &Params) -> Option<u64> {
    if t.is_exact() {
        params.budget
    } else {
        Some(params.budget.unwrap_or(DEFAULT_LIMIT_BUDGET))
    }
}

fn schedule(m: &Model, params: &Params) -> Vec<f64> {
    params
        .eps
        .clone()
        .unwrap_or_else(|| default_schedule(m.tree.as_ref(), params.cap(), m.growth))
}

fn omega(m: &Model, params: &Params) -> Result<Outcome> {
    let t = m.tree.as_ref();
    let eps = match params.eps.as_deref() {
        Some([e]) => *e,
        Some(_) => bail!("omega takes a single --eps value"),
        None => schedule(m, params)[0],
    };
    let cap = params.cap();
    let o = omega_enumerate_with(t, eps, cap, budget(t, params))?;
    let b = t.basis();
    let words: Vec<String> = o.elements.iter().map(|w| b.format_word(w.word())).collect();
    let mut out = Outcome::new(
        json!({
            "model": o.model,
            "epsilon": eps,
            "length_cap": cap,
            "size": words.len(),
            "elements": words,
            "complete": o.complete,
            "complete_through": o.complete_through,
            "nodes_visited": o.nodes_visited,
        }),
        table(&[
            ("model", o.model.clone()),
            ("epsilon", format!("{eps:e}")),
            ("length cap", cap.to_string()),
            ("complete through", o.complete_through.to_string()),
            ("size", words.len().to_string()),
            ("elements", preview(&words, 12)),
        ]),
    );
    if !o.complete {
        out.flags.insert("incomplete".into());
    }
    if !o.converged {
        out.flags.insert("unconverged".into());
    }
    if o.is_empty() && t.is_free_simplicial() == Some(true) {
        out.notes.push("free simplicial".into());
    }
    Ok(out)
}

fn language_outcome(
    l: &LaminaryLanguage,
    basis: &Basis,
    extra: serde_json::Value,
    rows: Vec<(&str, String)>,
) -> Outcome {
    let file = l.to_file(basis);
    let mut result = json!({ "size": l.len(), "language": file });
    if let (Some(r), serde_json::Value::Object(e)) = (result.as_object_mut(), extra) {
        r.extend(e);
    }
    let mut rows = rows;
    rows.push(("depth", l.depth().to_string()));
    rows.push(("size", l.len().to_string()));
    rows.push(("words", preview(&file.words, 16)));
    if !l.provenance().flags.is_empty() {
        rows.push((
            "flags",
            l.provenance().flags.iter().cloned().collect::<Vec<_>>().join(", "),
        ));
    }
    Outcome::new(result, table(&rows)).with_provenance(l.provenance())
}

fn lang(m: &Model, params: &Params) -> Result<Outcome> {
    let t = m.tree.as_ref();
    let sched = schedule(m, params);
    let (depth, cap) = (params.depth(), params.cap());
    let l = if sched.len() == 1 {
        l_epsilon_language_with(t, sched[0], depth, cap, budget(t, params))?
    } else {
        l_omega_language_with(t, depth, &sched, cap, budget(t, params))?
    };
    let mut o = language_outcome(
        &l,
        t.basis(),
        json!({ "model": t.model_id() }),
        vec![
            ("model", t.model_id()),
            ("construction", l.provenance().construction.clone()),
        ],
    );
    if l.provenance().has_flag("undercount") {
        o.notes.push(format!(
            "length cap {cap} is below twice the depth {depth}; words may be missing"
        ));
    }
    Ok(o)
}

fn member_rays(t: &dyn TreeModel, rays: &[Ray]) -> Vec<Ray> {
    let keep: Vec<bool> = rays.par_iter().map(|r| l1_test(r, t).member).collect();
    rays.iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(r, _)| r.clone())
        .collect()
}

fn ray_source(t: &dyn TreeModel, file: Option<&Path>, params: &Params) -> Result<(Vec<Ray>, serde_json::Value)> {
    Ok(match file {
        Some(p) => (
            load_rays(p, t.basis())?,
            json!({ "rays_file": p.display().to_string() }),
        ),
        None => (
            enumerate_rays(t.basis().rank(), params.prefix_cap(), params.period_cap()),
            json!({ "prefix_cap": params.prefix_cap(), "period_cap": params.period_cap() }),
        ),
    })
}

fn recurrent(m: &Model, file: Option<&Path>, params: &Params) -> Result<Outcome> {
    let t = m.tree.as_ref();
    let rank = t.basis().rank();
    let depth = params.depth();
    let (rays, source) = ray_source(t, file, params)?;
    let members = member_rays(t, &rays);
    let l = if members.is_empty() {
        LaminaryLanguage::empty(
            rank,
            depth,
            Provenance::new("l_infinity").param("rays", 0).param("depth", depth),
        )
    } else {
        l_infinity_language(rank, &members, depth)?
    };
    let mut o = language_outcome(
        &l,
        t.basis(),
        json!({ "model": t.model_id(), "rays": rays.len(), "l1_rays": members.len(), "source": source }),
        vec![
            ("model", t.model_id()),
            ("rays", rays.len().to_string()),
            ("L1 rays", members.len().to_string()),
        ],
    );
    if !t.is_exact() {
        o.notes.push("L1 verdicts are numeric".into());
    }
    Ok(o)
}

fn compare_files(left: &Path, right: &Path) -> Result<Outcome> {
    let (lb, l) = LaminaryLanguage::from_file(&read_json::<LanguageFile>(left)?)?;
    let (rb, r) = LaminaryLanguage::from_file(&read_json::<LanguageFile>(right)?)?;
    if !lb.compatible(&rb) {
        bail!("languages over different bases: {lb} and {rb}");
    }
    let c = compare(&lb, &l, &r);
    let verdict = if c.equal { "equal" } else { "different" };
    let rows = vec![
        ("verdict", verdict.to_string()),
        ("depths", format!("{} / {}", l.depth(), r.depth())),
        ("sizes", format!("{} / {}", l.len(), r.len())),
        ("left only", preview(&c.left_minus_right, 12)),
        ("right only", preview(&c.right_minus_left, 12)),
    ];
    Ok(Outcome::new(
        json!({
            "verdict": verdict,
            "equal": c.equal,
            "left_depth": l.depth(),
            "right_depth": r.depth(),
            "left_size": l.len(),
            "right_size": r.len(),
            "left_minus_right": c.left_minus_right,
            "right_minus_left": c.right_minus_left,
        }),
        table(&rows),
    ))
}

#[derive(Serialize)]
struct RayVerdict {
    ray: RayEntry,
    #[serde(flatten)]
    verdict: L1Verdict,
}

fn l1(m: &Model, file: Option<&Path>, inline: &[String], params: &Params) -> Result<Outcome> {
    let t = m.tree.as_ref();
    let b = t.basis();
    let listed = file.is_some() || !inline.is_empty();
    let mut rays = match file {
        Some(p) => load_rays(p, b)?,
        None => Vec::new(),
    };
    for s in inline {
        rays.push(RayEntry::parse_inline(s).to_ray(b)?);
    }
    let mut o = if listed {
        let verdicts: Vec<L1Verdict> = rays.par_iter().map(|r| l1_test(r, t)).collect();
        let members = verdicts.iter().filter(|v| v.member).count();
        let rows: Vec<RayVerdict> = rays
            .iter()
            .zip(verdicts)
            .map(|(r, v)| RayVerdict {
                ray: RayEntry::from_ray(b, r),
                verdict: v,
            })
            .collect();
        let mut lines = String::new();
        for r in &rows {
            lines.push_str(&format!(
                "{}  {}  |v| = {}\n",
                r.ray.display(),
                if r.verdict.member { "member" } else { "non-member" },
                r.verdict.period_length.render()
            ));
        }
        Outcome::new(
            json!({ "model": t.model_id(), "rays": rows.len(), "members": members, "verdicts": rows }),
            lines,
        )
    } else {
        let rays = enumerate_rays(b.rank(), params.prefix_cap(), params.period_cap());
        let members = member_rays(t, &rays).len();
        Outcome::new(
            json!({
                "model": t.model_id(),
                "prefix_cap": params.prefix_cap(),
                "period_cap": params.period_cap(),
                "rays": rays.len(),
                "members": members,
            }),
            table(&[
                ("model", t.model_id()),
                ("rays", rays.len().to_string()),
                ("members", members.to_string()),
            ]),
        )
    };
    if !t.is_exact() {
        o.notes.push("L1 verdicts are numeric".into());
    }
    Ok(o)
}

#[derive(Serialize)]
struct LeafVerdict {
    leaf: LeafEntry,
    #[serde(flatten)]
    verdict: QPairVerdict,
}

fn qpair(m: &Model, leaves: Option<&Path>, language: Option<&Path>, params: &Params) -> Result<Outcome> {
    let t = m.tree.as_ref();
    let b = t.basis();
    let Some(path) = leaves else {
        if !t.is_exact() {
            bail!("grouping rays by limit point needs an exact model; pass --leaves");
        }
        let depth = params.depth();
        let (rays, source) = ray_source(t, None, params)?;
        let fibers = q_fibers(t, &rays)?;
        let l = q_leaf_language(b.rank(), &fibers, depth);
        let members: usize = fibers.iter().map(|f| f.rays.len()).sum();
        let shared = fibers.iter().filter(|f| f.rays.len() > 1).count();
        let largest = fibers.iter().map(|f| f.rays.len()).max().unwrap_or(0);
        return Ok(language_outcome(
            &l,
            b,
            json!({
                "model": t.model_id(),
                "rays": rays.len(),
                "l1_rays": members,
                "fibers": fibers.len(),
                "shared_fibers": shared,
                "largest_fiber": largest,
                "source": source,
            }),
            vec![
                ("model", t.model_id()),
                ("L1 rays", members.to_string()),
                ("limit points", fibers.len().to_string()),
                ("shared points", shared.to_string()),
            ],
        ));
    };
    let leaves = load_leaves(path, b)?;
    let mut flags = BTreeSet::new();
    let mut notes = Vec::new();
    let verdicts: Vec<QPairVerdict> = if t.is_exact() {
        leaves
            .par_iter()
            .map(|l| q_pair_test(l, t))
            .collect::<lamtree::Result<_>>()?
    } else {
        let l = match language {
            Some(p) => LaminaryLanguage::from_file(&read_json::<LanguageFile>(p)?)?.1,
            None => l_omega_language_with(t, params.depth(), &schedule(m, params), params.cap(), budget(t, params))?,
        };
        flags.extend(l.provenance().flags.iter().cloned());
        notes.push(format!("decided by the depth-{} language of short elements", l.depth()));
        leaves.par_iter().map(|leaf| q_pair_by_language(leaf, &l)).collect()
    };
    let equal = verdicts.iter().filter(|v| v.equal).count();
    let rows: Vec<LeafVerdict> = leaves
        .iter()
        .zip(verdicts)
        .map(|(l, v)| LeafVerdict {
            leaf: LeafEntry {
                left: RayEntry::from_ray(b, l.left()),
                right: RayEntry::from_ray(b, l.right()),
            },
            verdict: v,
        })
        .collect();
    let mut lines = String::new();
    for r in &rows {
        lines.push_str(&format!(
            "{} / {}  {}\n",
            r.leaf.left.display(),
            r.leaf.right.display(),
            if r.verdict.equal { "same point" } else { "distinct" }
        ));
    }
    let mut o = Outcome::new(
        json!({ "model": t.model_id(), "leaves": rows.len(), "equal": equal, "verdicts": rows }),
        lines,
    );
    o.flags = flags;
    o.notes = notes;
    Ok(o)
}

fn bcc(reference: &str, params: &Params) -> Result<Outcome> {
    let alpha = load_automorphism(reference)?;
    let depth = params.depth();
    let certified = cancellation_bound(&alpha, depth)?;
    let cheap = cheap_bound(&alpha);
    Ok(Outcome::new(
        json!({
            "automorphism": AutomorphismFile::from_automorphism(&alpha),
            "hash": alpha.content_hash(),
            "cheap_bound": cheap,
            "certified": certified,
        }),
        table(&[
            ("automorphism", alpha.content_hash()),
            ("cheap bound", cheap.to_string()),
            (
                "bound at depth",
                format!("{} (depth {})", certified.value, certified.depth_checked),
            ),
        ]),
    ))
}
