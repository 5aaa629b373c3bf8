use std::collections::{BTreeMap, HashMap, VecDeque};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::TreeModel;
use crate::error::{Error, Result};
use crate::freewords::{Basis, CyclicWord, Letter, Word};
use crate::numeric::{format_rational, rational_from_json, Length, Rational};

/// An oriented edge: `+(i+1)` traverses edge `i` forwards, `-(i+1)` backwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedEdge(i32);

impl OrientedEdge {
    pub fn forward(edge: usize) -> Self {
        OrientedEdge(edge as i32 + 1)
    }

    pub fn edge(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_reversed(self) -> bool {
        self.0 < 0
    }

    pub fn reverse(self) -> Self {
        OrientedEdge(-self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length: Rational,
}

/// A finite connected graph with nonnegative edge lengths and a marking:
/// each basis letter is sent to an edge loop at the base vertex. Edges of
/// length zero are collapsed in the universal cover.
#[derive(Clone, Debug)]
pub struct MarkedMetricGraph {
    basis: Basis,
    vertices: Vec<String>,
    edges: Vec<GraphEdge>,
    marking: Vec<Vec<OrientedEdge>>,
    base: usize,
    // lengths scaled to integers over a common denominator
    scaled: Vec<i64>,
    denom: i64,
    id: String,
}

impl MarkedMetricGraph {
    pub fn new(
        basis: Basis,
        vertices: Vec<String>,
        edges: Vec<GraphEdge>,
        marking: Vec<Vec<OrientedEdge>>,
        base: usize,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        if vertices.is_empty() {
            return bad("no vertices".into());
        }
        if base >= vertices.len() {
            return bad("base vertex out of range".into());
        }
        if marking.len() != basis.rank() {
            return bad(format!("marking has {} loops for rank {}", marking.len(), basis.rank()));
        }
        for e in &edges {
            if e.from >= vertices.len() || e.to >= vertices.len() {
                return bad(format!("edge {} has an unknown endpoint", e.id));
            }
            if e.length.is_negative() {
                return bad(format!("edge {} has negative length", e.id));
            }
        }
        if edges.iter().all(|e| e.length.is_zero()) {
            return Err(Error::DegenerateTree("all edge lengths are zero".into()));
        }
        let mut g = MarkedMetricGraph {
            basis,
            vertices,
            edges,
            marking,
            base,
            scaled: Vec::new(),
            denom: 1,
            id: String::new(),
        };
        g.check_paths()?;
        g.check_marking_is_basis()?;
        g.denom = g.edges.iter().fold(1i64, |d, e| d.lcm(e.length.denom()));
        g.scaled = g
            .edges
            .iter()
            .map(|e| e.length.numer() * (g.denom / e.length.denom()))
            .collect();
        g.id = format!("graph:{}", g.content_hash());
        Ok(g)
    }

    /// The rose with one petal per basis letter and the given lengths.
    pub fn rose(basis: &Basis, lengths: &[Rational]) -> Result<Self> {
        if lengths.len() != basis.rank() {
            return Err(Error::InvalidModel("one length per letter expected".into()));
        }
        let edges = basis
            .symbols()
            .iter()
            .zip(lengths)
            .map(|(s, &length)| GraphEdge {
                id: format!("e_{s}"),
                from: 0,
                to: 0,
                length,
            })
            .collect();
        let marking = (0..basis.rank()).map(|i| vec![OrientedEdge::forward(i)]).collect();
        MarkedMetricGraph::new(basis.clone(), vec!["v".into()], edges, marking, 0)
    }

    pub fn unit_rose(basis: &Basis) -> Result<Self> {
        MarkedMetricGraph::rose(basis, &vec![Rational::from_integer(1); basis.rank()])
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn marking(&self) -> &[Vec<OrientedEdge>] {
        &self.marking
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    fn tail(&self, e: OrientedEdge) -> usize {
        let edge = &self.edges[e.edge()];
        if e.is_reversed() {
            edge.to
        } else {
            edge.from
        }
    }

    fn head(&self, e: OrientedEdge) -> usize {
        self.tail(e.reverse())
    }

    fn check_paths(&self) -> Result<()> {
        for (i, path) in self.marking.iter().enumerate() {
            let name = self.basis.symbols()[i].clone();
            if path.is_empty() {
                return Err(Error::InvalidModel(format!("marking loop for {name} is empty")));
            }
            let mut at = self.base;
            for &e in path {
                if e.edge() >= self.edges.len() {
                    return Err(Error::InvalidModel(format!(
                        "marking loop for {name} uses an unknown edge"
                    )));
                }
                if self.tail(e) != at {
                    return Err(Error::InvalidModel(format!("marking loop for {name} is not a path")));
                }
                at = self.head(e);
            }
            if at != self.base {
                return Err(Error::InvalidModel(format!(
                    "marking loop for {name} is not closed at the base"
                )));
            }
        }
        Ok(())
    }

    /// Connectivity, Euler characteristic, then Stallings folding of the
    /// marking loops written in the free basis given by a spanning tree.
    fn check_marking_is_basis(&self) -> Result<()> {
        let nv = self.vertices.len();
        let mut parent_edge: Vec<Option<OrientedEdge>> = vec![None; nv];
        let mut seen = vec![false; nv];
        let mut in_tree = vec![false; self.edges.len()];
        seen[self.base] = true;
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                for (from, to, oe) in [
                    (e.from, e.to, OrientedEdge::forward(i)),
                    (e.to, e.from, OrientedEdge::forward(i).reverse()),
                ] {
                    if from == v && !seen[to] {
                        seen[to] = true;
                        in_tree[i] = true;
                        parent_edge[to] = Some(oe);
                        queue.push_back(to);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidModel("graph is not connected".into()));
        }
        let rank = self.edges.len() + 1 - nv;
        if rank != self.basis.rank() {
            return Err(Error::InvalidModel(format!(
                "graph has fundamental group of rank {rank}, basis has rank {}",
                self.basis.rank()
            )));
        }
        let mut generator = vec![None; self.edges.len()];
        let mut next = 0;
        for (i, t) in in_tree.iter().enumerate() {
            if !t {
                generator[i] = Some(next);
                next += 1;
            }
        }
        let words: Vec<Word> = self
            .marking
            .iter()
            .map(|path| {
                Word::reduce(path.iter().filter_map(|&e| {
                    generator[e.edge()].map(|g| {
                        let l = Letter::generator(g);
                        if e.is_reversed() {
                            l.inverse()
                        } else {
                            l
                        }
                    })
                }))
            })
            .collect();
        if !generates_free_group(&words, rank) {
            return Err(Error::InvalidModel(
                "marking loops do not generate the fundamental group".into(),
            ));
        }
        Ok(())
    }

    /// The same graph with the listed edges set to length zero.
    pub fn contract(&self, edge_ids: &[&str]) -> Result<MarkedMetricGraph> {
        let mut edges = self.edges.clone();
        for id in edge_ids {
            let i = self
                .edge_index(id)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown edge {id}")))?;
            edges[i].length = Rational::zero();
        }
        MarkedMetricGraph::new(
            self.basis.clone(),
            self.vertices.clone(),
            edges,
            self.marking.clone(),
            self.base,
        )
    }

    /// Ids of the zero-length edges: the part of the graph collapsed to points
    /// in the tree.
    pub fn zero_length_subgraph(&self) -> Vec<String> {
        self.edges
            .iter()
            .filter(|e| e.length.is_zero())
            .map(|e| e.id.clone())
            .collect()
    }

    /// Rank of the fundamental group of the zero-length subgraph; positive iff
    /// some nontrivial element fixes a point of the tree.
    pub fn elliptic_rank(&self) -> usize {
        let nv = self.vertices.len();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut cycles = 0;
        for e in self.edges.iter().filter(|e| e.length.is_zero()) {
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            if a == b {
                cycles += 1;
            } else {
                parent[a] = b;
            }
        }
        cycles
    }

    /// Edge path of `w`, freely reduced.
    pub fn tightened_path(&self, w: &Word) -> Vec<OrientedEdge> {
        let mut out: Vec<OrientedEdge> = Vec::new();
        for &l in w.letters() {
            let path = &self.marking[l.index()];
            if l.is_inverse() {
                for &e in path.iter().rev() {
                    push_edge(&mut out, e.reverse());
                }
            } else {
                for &e in path {
                    push_edge(&mut out, e);
                }
            }
        }
        out
    }

    fn path_length(&self, path: &[OrientedEdge]) -> Rational {
        let s: i64 = path.iter().map(|e| self.scaled[e.edge()]).sum();
        Rational::new(s, self.denom)
    }

    fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.basis.symbols().join(",").as_bytes());
        for e in &self.edges {
            h.update(format!("|{}:{}:{}:{}", e.id, e.from, e.to, e.length).as_bytes());
        }
        for p in &self.marking {
            h.update(format!("|{:?}", p).as_bytes());
        }
        h.update(format!("|{}", self.base).as_bytes());
        hex::encode(&h.finalize()[..6])
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let f: MarkedGraphFile = serde_json::from_str(json)?;
        f.into_graph()
    }

    pub fn to_file(&self) -> MarkedGraphFile {
        let marking = self
            .marking
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let names = p
                    .iter()
                    .map(|e| {
                        let id = &self.edges[e.edge()].id;
                        if e.is_reversed() {
                            format!("{id}'")
                        } else {
                            id.clone()
                        }
                    })
                    .collect();
                (self.basis.symbols()[i].clone(), names)
            })
            .collect();
        MarkedGraphFile {
            basis: Some(self.basis.symbols().join(" ")),
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeEntry {
                    id: e.id.clone(),
                    from: self.vertices[e.from].clone(),
                    to: self.vertices[e.to].clone(),
                    length: serde_json::Value::String(format_rational(&e.length)),
                })
                .collect(),
            marking,
            base: self.vertices[self.base].clone(),
        }
    }
}

fn push_edge(out: &mut Vec<OrientedEdge>, e: OrientedEdge) {
    if out.last() == Some(&e.reverse()) {
        out.pop();
    } else {
        out.push(e);
    }
}

impl TreeModel for MarkedMetricGraph {
    fn basis(&self) -> &Basis {
        &self.basis
    }

    fn model_id(&self) -> String {
        self.id.clone()
    }

    fn translation_length(&self, w: &CyclicWord) -> Length {
        let p = self.tightened_path(w.word());
        let (mut i, mut j) = (0, p.len());
        while j - i >= 2 && p[i] == p[j - 1].reverse() {
            i += 1;
            j -= 1;
        }
        Length::Exact(self.path_length(&p[i..j]))
    }

    fn displacement(&self, w: &Word) -> Length {
        Length::Exact(self.path_length(&self.tightened_path(w)))
    }

    fn is_free_simplicial(&self) -> Option<bool> {
        // zero-length trees (no cycles) collapse without creating stabilizers
        Some(self.elliptic_rank() == 0)
    }
}

/// Whether the given words generate the free group of the given rank, by
/// folding their bouquet down to the one-vertex rose.
pub(crate) fn generates_free_group(words: &[Word], rank: usize) -> bool {
    // vertices 0 = base; edges (u, generator, v)
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut nv = 1;
    for w in words {
        if w.is_empty() {
            continue;
        }
        let mut at = 0;
        let n = w.len();
        for (k, &l) in w.letters().iter().enumerate() {
            let to = if k + 1 == n {
                0
            } else {
                nv += 1;
                nv - 1
            };
            if l.is_inverse() {
                edges.push((to, l.index(), at));
            } else {
                edges.push((at, l.index(), to));
            }
            at = to;
        }
    }
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    loop {
        let mut merged = false;
        let mut seen: HashMap<(usize, usize, bool), usize> = HashMap::new();
        for &(u, g, v) in &edges {
            let (u, v) = (find(&mut parent, u), find(&mut parent, v));
            for (from, dir, to) in [(u, true, v), (v, false, u)] {
                match seen.get(&(from, g, dir)) {
                    Some(&t) => {
                        let (a, b) = (find(&mut parent, t), find(&mut parent, to));
                        if a != b {
                            parent[a] = b;
                            merged = true;
                        }
                    }
                    None => {
                        seen.insert((from, g, dir), to);
                    }
                }
            }
        }
        if !merged {
            let roots: std::collections::BTreeSet<usize> = (0..nv).map(|x| find(&mut parent, x)).collect();
            let labels: std::collections::BTreeSet<(usize, bool)> = seen.keys().map(|&(_, g, d)| (g, d)).collect();
            return roots.len() == 1 && labels.len() == 2 * rank;
        }
    }
}

/// On-disk form of a marked metric graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkedGraphFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeEntry>,
    pub marking: BTreeMap<String, Vec<String>>,
    pub base: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: serde_json::Value,
}

impl MarkedGraphFile {
    pub fn into_graph(self) -> Result<MarkedMetricGraph> {
        let basis = match &self.basis {
            Some(b) => Basis::parse(b)?,
            None => Basis::new("", self.marking.keys().cloned().collect())?,
        };
        let vidx = |name: &str| {
            self.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Format(format!("unknown vertex {name}")))
        };
        let mut edges = Vec::new();
        for e in &self.edges {
            if edges.iter().any(|x: &GraphEdge| x.id == e.id) {
                return Err(Error::Format(format!("duplicate edge id {}", e.id)));
            }
            edges.push(GraphEdge {
                id: e.id.clone(),
                from: vidx(&e.from)?,
                to: vidx(&e.to)?,
                length: rational_from_json(&e.length)?,
            });
        }
        let mut marking = Vec::new();
        for sym in basis.symbols() {
            let path = self
                .marking
                .get(sym)
                .ok_or_else(|| Error::Format(format!("no marking loop for {sym}")))?;
            let mut oriented = Vec::new();
            for name in path {
                let (id, rev) = match name.strip_suffix('\'') {
                    Some(id) => (id, true),
                    None => (name.as_str(), false),
                };
                let i = edges
                    .iter()
                    .position(|e| e.id == id)
                    .ok_or_else(|| Error::Format(format!("unknown edge {id}")))?;
                let oe = OrientedEdge::forward(i);
                oriented.push(if rev { oe.reverse() } else { oe });
            }
            marking.push(oriented);
        }
        if self.marking.len() != basis.rank() {
            return Err(Error::Format("marking keys do not match the basis".into()));
        }
        let base = vidx(&self.base)?;
        MarkedMetricGraph::new(basis, self.vertices, edges, marking, base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Basis {
        Basis::from_chars("abc").unwrap()
    }

    fn w(s: &str) -> Word {
        abc().parse_word(s).unwrap()
    }

    fn len(t: &MarkedMetricGraph, s: &str) -> Length {
        super::super::length_of(t, &w(s)).unwrap()
    }

    #[test]
    fn unit_rose_lengths() {
        let t = MarkedMetricGraph::unit_rose(&abc()).unwrap();
        assert_eq!(len(&t, "abc"), Length::exact(3));
        assert_eq!(len(&t, "b a b'"), Length::exact(1));
        assert_eq!(t.displacement(&w("a b'")), Length::exact(2));
        assert_eq!(t.bbt_bound(), Length::exact(3));
        assert_eq!(t.is_free_simplicial(), Some(true));
    }

    #[test]
    fn collapsed_petal() {
        let t = MarkedMetricGraph::unit_rose(&abc())
            .unwrap()
            .contract(&["e_c"])
            .unwrap();
        assert_eq!(len(&t, "c"), Length::zero());
        assert_eq!(len(&t, "a"), Length::exact(1));
        assert_eq!(t.displacement(&w("cccc")), Length::zero());
        assert_eq!(t.bbt_bound(), Length::exact(2));
        assert_eq!(t.zero_length_subgraph(), vec!["e_c".to_string()]);
        assert_eq!(t.elliptic_rank(), 1);
        let all = MarkedMetricGraph::unit_rose(&abc()).unwrap();
        assert!(matches!(
            all.contract(&["e_a", "e_b", "e_c"]),
            Err(Error::DegenerateTree(_))
        ));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let json = r#"{
            "vertices": ["u", "v"],
            "edges": [
                {"id": "e", "from": "u", "to": "v", "length": "1/2"},
                {"id": "x", "from": "u", "to": "u", "length": 1},
                {"id": "y", "from": "u", "to": "u", "length": "0.5"},
                {"id": "z", "from": "v", "to": "v", "length": 0}
            ],
            "marking": {"a": ["x"], "b": ["y"], "c": ["e", "z", "e'"]},
            "base": "u"
        }"#;
        let g = MarkedMetricGraph::from_json(json).unwrap();
        assert_eq!(g.displacement(&w("c")), Length::Exact(Rational::from_integer(1)));
        assert_eq!(len(&g, "c"), Length::zero());
        assert_eq!(len(&g, "a c"), Length::Exact(Rational::from_integer(2)));
        let again = serde_json::to_string(&g.to_file()).unwrap();
        let g2 = MarkedMetricGraph::from_json(&again).unwrap();
        assert_eq!(g2.model_id(), g.model_id());

        // marking that does not generate: c ↦ x (a repeated)
        let bad = json.replace(r#""c": ["e", "z", "e'"]"#, r#""c": ["x", "x"]"#);
        assert!(MarkedMetricGraph::from_json(&bad).is_err());
        // not a closed path
        let bad = json.replace(r#""c": ["e", "z", "e'"]"#, r#""c": ["e", "z"]"#);
        assert!(MarkedMetricGraph::from_json(&bad).is_err());
    }

    #[test]
    fn folding_detects_bases() {
        let b = abc();
        let ws = |v: &[&str]| v.iter().map(|s| b.parse_word(s).unwrap()).collect::<Vec<_>>();
        assert!(generates_free_group(&ws(&["a", "b", "c"]), 3));
        assert!(generates_free_group(&ws(&["b a b'", "b", "c a"]), 3));
        assert!(!generates_free_group(&ws(&["a a", "b", "c"]), 3));
        assert!(!generates_free_group(&ws(&["a b", "b a", "c"]), 3));
    }
}
