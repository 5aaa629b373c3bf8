use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use lamtree::basischange::{dehn_twist, tribonacci, Automorphism, AutomorphismFile};
use lamtree::freewords::Basis;
use lamtree::limittrees::{IterateCache, LimitTree, TrainTrackFile, TrainTrackSpec};
use lamtree::numeric::Rational;
use lamtree::treemodels::{load_exact_model, MarkedGraphFile, MarkedMetricGraph, Pullback, SplittingTree, TreeModel};
use serde_json::Value;

/// Prefix for models and automorphisms shipped with the binary.
pub const BUILTIN: &str = "builtin:";

pub const BUILTIN_MODELS: &[&str] = &["unit-rose", "collapsed-rose", "gamma-b", "two-vertex", "tribonacci"];
pub const BUILTIN_AUTOMORPHISMS: &[&str] = &["dehn-twist", "dehn-twist-inverse", "tribonacci"];

/// Settings that affect how limit trees are built.
#[derive(Clone, Debug)]
pub struct LimitSettings {
    pub k_max: usize,
    pub tol: f64,
    pub cache_dir: Option<PathBuf>,
}

/// A resolved model; `growth` is the stretch factor of a limit tree.
pub struct Model {
    pub tree: Arc<dyn TreeModel>,
    pub growth: Option<f64>,
    /// Iterate cache of the limit tree behind the model, if any.
    pub cache: Option<Arc<IterateCache>>,
}

fn abc() -> Basis {
    Basis::from_chars("abc").expect("valid basis")
}

fn builtin_model(name: &str, limit: &LimitSettings) -> Result<Model> {
    let exact = |t: Arc<dyn TreeModel>| Model {
        tree: t,
        growth: None,
        cache: None,
    };
    Ok(match name {
        "unit-rose" => exact(Arc::new(MarkedMetricGraph::unit_rose(&abc())?)),
        "collapsed-rose" => exact(Arc::new(MarkedMetricGraph::unit_rose(&abc())?.contract(&["e_c"])?)),
        "gamma-b" => exact(Arc::new(SplittingTree::gamma_b(Rational::from_integer(1), 1)?)),
        "two-vertex" => exact(Arc::new(two_vertex()?)),
        "tribonacci" => {
            let spec = TrainTrackSpec::new(tribonacci(), None, false)?;
            limit_model(spec, limit)?
        }
        _ => bail!(
            "unknown builtin model {name:?}; expected one of {}",
            BUILTIN_MODELS.join(", ")
        ),
    })
}

/// Two vertices joined by an edge of length 1, zero-length loops `a`, `b`
/// at one end and a zero-length loop at the other, marked so that `c` runs
/// across the edge and around that loop.
pub fn two_vertex() -> Result<MarkedMetricGraph> {
    let f: MarkedGraphFile = serde_json::from_value(serde_json::json!({
        "basis": "abc",
        "vertices": ["u", "w"],
        "edges": [
            {"id": "e", "from": "u", "to": "w", "length": 1},
            {"id": "loop_a", "from": "u", "to": "u", "length": 0},
            {"id": "loop_b", "from": "u", "to": "u", "length": 0},
            {"id": "loop_c", "from": "w", "to": "w", "length": 0}
        ],
        "marking": {"a": ["loop_a"], "b": ["loop_b"], "c": ["e", "loop_c", "e'"]},
        "base": "u"
    }))?;
    Ok(f.into_graph()?)
}

fn limit_model(spec: TrainTrackSpec, limit: &LimitSettings) -> Result<Model> {
    let t = LimitTree::new(spec, limit.k_max, limit.tol, limit.cache_dir.as_deref())?;
    let growth = t.lambda();
    let cache = Some(t.cache().clone());
    Ok(Model {
        tree: Arc::new(t),
        growth: Some(growth),
        cache,
    })
}

/// Resolves `builtin:NAME` or a JSON model file. Files holding an
/// `automorphism` build a limit tree; files holding `pullback` and `model`
/// pull another model back by an automorphism; anything else is an exact
/// model file.
pub fn load_model(reference: &str, limit: &LimitSettings) -> Result<Model> {
    if let Some(name) = reference.strip_prefix(BUILTIN) {
        return builtin_model(name, limit);
    }
    let path = Path::new(reference);
    let text = fs::read_to_string(path).with_context(|| format!("reading model {reference}"))?;
    model_from_json(&text, path.parent().unwrap_or(Path::new(".")), limit)
        .with_context(|| format!("loading model {reference}"))
}

fn model_from_json(text: &str, dir: &Path, limit: &LimitSettings) -> Result<Model> {
    let v: Value = serde_json::from_str(text)?;
    if let (Some(alpha), Some(inner)) = (v.get("pullback"), v.get("model")) {
        let alpha = automorphism_from_value(alpha, dir)?;
        let inner = match inner {
            Value::String(r) => load_model(&relative(r, dir), limit)?,
            other => model_from_json(&other.to_string(), dir, limit)?,
        };
        return Ok(Model {
            tree: Arc::new(Pullback::new(inner.tree, alpha)?),
            growth: inner.growth,
            cache: inner.cache,
        });
    }
    if v.get("automorphism").is_some() {
        let f: TrainTrackFile = serde_json::from_value(v)?;
        let spec = TrainTrackSpec::new(f.automorphism.into_automorphism()?, f.matrix, f.train_track)?;
        return limit_model(spec, limit);
    }
    Ok(Model {
        tree: load_exact_model(text)?,
        growth: None,
        cache: None,
    })
}

fn relative(reference: &str, dir: &Path) -> String {
    if reference.starts_with(BUILTIN) || Path::new(reference).is_absolute() {
        reference.to_string()
    } else {
        dir.join(reference).to_string_lossy().into_owned()
    }
}

fn automorphism_from_value(v: &Value, dir: &Path) -> Result<Automorphism> {
    match v {
        Value::String(r) => load_automorphism(&relative(r, dir)),
        other => Ok(serde_json::from_value::<AutomorphismFile>(other.clone())?.into_automorphism()?),
    }
}

/// Resolves `builtin:NAME` or an automorphism JSON file.
pub fn load_automorphism(reference: &str) -> Result<Automorphism> {
    if let Some(name) = reference.strip_prefix(BUILTIN) {
        return Ok(match name {
            "dehn-twist" => dehn_twist(),
            "dehn-twist-inverse" => dehn_twist().inverse()?,
            "tribonacci" => tribonacci(),
            _ => bail!(
                "unknown builtin automorphism {name:?}; expected one of {}",
                BUILTIN_AUTOMORPHISMS.join(", ")
            ),
        });
    }
    let text = fs::read_to_string(reference).with_context(|| format!("reading automorphism {reference}"))?;
    let f: AutomorphismFile = serde_json::from_str(&text).with_context(|| format!("parsing {reference}"))?;
    Ok(f.into_automorphism()?)
}
