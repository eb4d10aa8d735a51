//! Kochen-Specker machinery: rays, orthogonality diagrams, and two-valued
//! measures.
//!
//! A *ray* is an unoriented direction in real 3-space, stored in a canonical
//! form (unit length, first significant component positive) so approximate
//! equality is well defined. A set of rays induces an *orthogonality
//! diagram*: its maximal contexts are triads of mutually orthogonal rays,
//! plus any leftover orthogonal pairs that do not extend to a triad within
//! the set.
//!
//! A *two-valued measure* assigns 0 or 1 to every ray such that every triad
//! carries exactly one 1 and no two orthogonal rays both carry 1. These are
//! the candidate truth assignments of a classical, noncontextual hidden
//! variable model; the squared spin component along a ray would read
//! `1 - measure(ray)` on its 0/1 scale. Diagrams that admit no such measure
//! are the combinatorial core of the Kochen-Specker theorem. The search here
//! is a plain backtracker with unit propagation over contexts, deterministic
//! in both its answer and its explored-node count, with an exhaustive
//! enumerator for small diagrams used as an oracle in tests.
//!
//! A 17-direction set due to Peres is built in. On its own it is colorable;
//! closing it under cross products of orthogonal pairs blows it up to 57
//! rays and 40 triads and kills every candidate measure, which is the
//! noncolorability result the rest of the crate leans on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use std::f64::consts::FRAC_PI_2;

/// Component tolerance for canonical-form ray equality.
pub const RAY_EQ_TOL: f64 = 1e-9;

/// Inner-product tolerance below which two rays count as orthogonal.
pub const ORTHO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KsError {
    #[error("ray ({x}, {y}, {z}) has zero length")]
    ZeroRay { x: f64, y: f64, z: f64 },
    #[error("ray component {0} is not finite")]
    NonFiniteRay(f64),
    #[error(
        "tripod azimuth phi = {phi} is a multiple of pi/2 (within {tol:.1e}); \
         the rotated tripod would coincide with the unrotated one"
    )]
    DegenerateTripods { phi: f64, tol: f64 },
    #[error("ray file line {line}: {message}")]
    RayFileParse { line: usize, message: String },
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("diagram JSON is malformed: {0}")]
    DiagramParse(String),
}

/// An unoriented direction in real 3-space, held in canonical form: unit
/// norm, with the first component of magnitude above [`RAY_EQ_TOL`] made
/// positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Ray {
    components: [f64; 3],
}

impl From<Ray> for [f64; 3] {
    fn from(r: Ray) -> [f64; 3] {
        r.components
    }
}

impl TryFrom<[f64; 3]> for Ray {
    type Error = KsError;

    fn try_from(v: [f64; 3]) -> Result<Ray, KsError> {
        Ray::new(v[0], v[1], v[2])
    }
}

impl Ray {
    /// Canonicalizes an arbitrary nonzero vector into a ray.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Ray, KsError> {
        for v in [x, y, z] {
            if !v.is_finite() {
                return Err(KsError::NonFiniteRay(v));
            }
        }
        let norm = (x * x + y * y + z * z).sqrt();
        if norm == 0.0 {
            return Err(KsError::ZeroRay { x, y, z });
        }
        let mut components = [x / norm, y / norm, z / norm];
        let pivot = components.iter().find(|c| c.abs() > RAY_EQ_TOL);
        if let Some(&p) = pivot {
            if p < 0.0 {
                for c in &mut components {
                    *c = -*c;
                }
            }
        }
        Ok(Ray { components })
    }

    pub fn components(&self) -> [f64; 3] {
        self.components
    }

    /// Componentwise equality within [`RAY_EQ_TOL`]; well defined because
    /// both sides are canonical.
    pub fn approx_eq(&self, other: &Ray) -> bool {
        self.components
            .iter()
            .zip(other.components.iter())
            .all(|(a, b)| (a - b).abs() <= RAY_EQ_TOL)
    }

    pub fn dot(&self, other: &Ray) -> f64 {
        self.components
            .iter()
            .zip(other.components.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn is_orthogonal_to(&self, other: &Ray) -> bool {
        self.dot(other).abs() <= ORTHO_TOL
    }

    /// The ray orthogonal to both inputs, or `None` when they are parallel.
    pub fn cross(&self, other: &Ray) -> Option<Ray> {
        let [a1, a2, a3] = self.components;
        let [b1, b2, b3] = other.components;
        let c = [a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1];
        let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        if norm <= RAY_EQ_TOL {
            return None;
        }
        Some(Ray::new(c[0], c[1], c[2]).expect("cross product of unit rays is finite and nonzero"))
    }
}

/// Canonicalizes a raw vector; alias for [`Ray::new`] on the components.
pub fn canonicalize(v: [f64; 3]) -> Result<Ray, KsError> {
    Ray::new(v[0], v[1], v[2])
}

/// Serialized form of [`OrthogonalityDiagram`].
#[derive(Serialize, Deserialize)]
struct DiagramRepr {
    rays: Vec<Ray>,
    triads: Vec<[usize; 3]>,
    pairs: Vec<[usize; 2]>,
}

impl From<OrthogonalityDiagram> for DiagramRepr {
    fn from(d: OrthogonalityDiagram) -> DiagramRepr {
        DiagramRepr {
            rays: d.rays,
            triads: d.triads,
            pairs: d.pairs,
        }
    }
}

impl TryFrom<DiagramRepr> for OrthogonalityDiagram {
    type Error = KsError;

    fn try_from(r: DiagramRepr) -> Result<OrthogonalityDiagram, KsError> {
        let n = r.rays.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if r.rays[i].approx_eq(&r.rays[j]) {
                    return Err(KsError::InvalidDiagram(format!(
                        "rays {i} and {j} coincide"
                    )));
                }
            }
        }
        for triad in &r.triads {
            for &idx in triad {
                if idx >= n {
                    return Err(KsError::InvalidDiagram(format!(
                        "triad index {idx} out of range for {n} rays"
                    )));
                }
            }
            let [a, b, c] = *triad;
            if !(r.rays[a].is_orthogonal_to(&r.rays[b])
                && r.rays[a].is_orthogonal_to(&r.rays[c])
                && r.rays[b].is_orthogonal_to(&r.rays[c]))
            {
                return Err(KsError::InvalidDiagram(format!(
                    "triad ({a}, {b}, {c}) is not mutually orthogonal"
                )));
            }
        }
        for pair in &r.pairs {
            for &idx in pair {
                if idx >= n {
                    return Err(KsError::InvalidDiagram(format!(
                        "pair index {idx} out of range for {n} rays"
                    )));
                }
            }
            let [a, b] = *pair;
            if !r.rays[a].is_orthogonal_to(&r.rays[b]) {
                return Err(KsError::InvalidDiagram(format!(
                    "pair ({a}, {b}) is not orthogonal"
                )));
            }
        }
        Ok(OrthogonalityDiagram {
            rays: r.rays,
            triads: r.triads,
            pairs: r.pairs,
        })
    }
}

/// A set of distinct canonical rays with its orthogonality structure:
/// `triads` are the maximal contexts (mutually orthogonal triples), `pairs`
/// the orthogonal pairs not contained in any triad of the set. Both index
/// lists are sorted lexicographically, so equal ray sets produce identical
/// diagrams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiagramRepr", into = "DiagramRepr")]
pub struct OrthogonalityDiagram {
    rays: Vec<Ray>,
    triads: Vec<[usize; 3]>,
    pairs: Vec<[usize; 2]>,
}

impl OrthogonalityDiagram {
    /// Builds the diagram of a ray list, dropping duplicates (first
    /// occurrence wins) and computing contexts.
    pub fn from_rays(rays: Vec<Ray>) -> OrthogonalityDiagram {
        let mut distinct: Vec<Ray> = Vec::with_capacity(rays.len());
        for ray in rays {
            if !distinct.iter().any(|r| r.approx_eq(&ray)) {
                distinct.push(ray);
            }
        }
        let n = distinct.len();
        let mut orthogonal = vec![vec![false; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if distinct[i].is_orthogonal_to(&distinct[j]) {
                    orthogonal[i][j] = true;
                    orthogonal[j][i] = true;
                }
            }
        }
        let mut triads = Vec::new();
        let mut in_triad = vec![vec![false; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if !orthogonal[i][j] {
                    continue;
                }
                for k in (j + 1)..n {
                    if orthogonal[i][k] && orthogonal[j][k] {
                        triads.push([i, j, k]);
                        in_triad[i][j] = true;
                        in_triad[i][k] = true;
                        in_triad[j][k] = true;
                    }
                }
            }
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if orthogonal[i][j] && !in_triad[i][j] {
                    pairs.push([i, j]);
                }
            }
        }
        OrthogonalityDiagram {
            rays: distinct,
            triads,
            pairs,
        }
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn triads(&self) -> &[[usize; 3]] {
        &self.triads
    }

    pub fn pairs(&self) -> &[[usize; 2]] {
        &self.pairs
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    /// Structural equality with tolerant ray comparison.
    pub fn approx_eq(&self, other: &OrthogonalityDiagram) -> bool {
        self.rays.len() == other.rays.len()
            && self
                .rays
                .iter()
                .zip(other.rays.iter())
                .all(|(a, b)| a.approx_eq(b))
            && self.triads == other.triads
            && self.pairs == other.pairs
    }
}

/// The 17-direction set: the two coordinate axes orthogonal to (1,0,0),
/// every permutation of (0, 1, sqrt2) and (1, 1, sqrt2), and every
/// permutation of (1, -1, sqrt2). As given, it contains no complete triad -
/// only 14 bare orthogonal pairs - and is colorable; its orthogonality
/// closure is not.
pub fn peres_directions() -> Vec<Ray> {
    const R: f64 = std::f64::consts::SQRT_2;
    let raw: [[f64; 3]; 17] = [
        [0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0],
        [0.0, 1.0, R],
        [0.0, R, 1.0],
        [1.0, 0.0, R],
        [R, 0.0, 1.0],
        [1.0, R, 0.0],
        [R, 1.0, 0.0],
        [1.0, 1.0, R],
        [1.0, R, 1.0],
        [R, 1.0, 1.0],
        [1.0, -1.0, R],
        [-1.0, 1.0, R],
        [1.0, R, -1.0],
        [-1.0, R, 1.0],
        [R, 1.0, -1.0],
        [R, -1.0, 1.0],
    ];
    raw.iter()
        .map(|&[x, y, z]| Ray::new(x, y, z).expect("fixed nonzero directions"))
        .collect()
}

/// Tolerance on the azimuth below which the two tripods of
/// [`two_tripod_diagram`] would collapse into one.
pub const TRIPOD_ANGLE_TOL: f64 = 1e-9;

/// Two orthogonal tripods sharing the third axis: `{x, y, z}` and the pair
/// rotated by `phi` about `z`. Azimuths within [`TRIPOD_ANGLE_TOL`] of a
/// multiple of pi/2 are rejected because the tripods would coincide as rays.
///
/// Ray order is `[x, y, z, x', y']`, giving the triads `(0,1,2)` and
/// `(2,3,4)` glued at index 2.
pub fn two_tripod_diagram(phi: f64) -> Result<OrthogonalityDiagram, KsError> {
    if !phi.is_finite() {
        return Err(KsError::NonFiniteRay(phi));
    }
    let residue = phi.rem_euclid(FRAC_PI_2);
    if residue <= TRIPOD_ANGLE_TOL || (FRAC_PI_2 - residue) <= TRIPOD_ANGLE_TOL {
        return Err(KsError::DegenerateTripods {
            phi,
            tol: TRIPOD_ANGLE_TOL,
        });
    }
    let rays = vec![
        Ray::new(1.0, 0.0, 0.0).expect("x axis"),
        Ray::new(0.0, 1.0, 0.0).expect("y axis"),
        Ray::new(0.0, 0.0, 1.0).expect("z axis"),
        Ray::new(phi.cos(), phi.sin(), 0.0).expect("rotated x axis"),
        Ray::new(-phi.sin(), phi.cos(), 0.0).expect("rotated y axis"),
    ];
    Ok(OrthogonalityDiagram::from_rays(rays))
}

/// Closes a ray set under cross products of orthogonal pairs, then builds
/// the diagram of the closure. Every orthogonal pair in the result is part
/// of a complete triad, because the completing third ray has been adjoined.
/// Terminates because each round only adds rays generated by a finite set.
pub fn orthogonality_closure(rays: &[Ray]) -> OrthogonalityDiagram {
    let mut closed: Vec<Ray> = Vec::with_capacity(rays.len());
    for &ray in rays {
        if !closed.iter().any(|r| r.approx_eq(&ray)) {
            closed.push(ray);
        }
    }
    let mut frontier_start = 0;
    while frontier_start < closed.len() {
        let known = closed.len();
        // Only pairs touching the newest rays can produce anything new.
        for i in 0..known {
            let j_start = frontier_start.max(i + 1);
            for j in j_start..known {
                if !closed[i].is_orthogonal_to(&closed[j]) {
                    continue;
                }
                if let Some(third) = closed[i].cross(&closed[j]) {
                    if !closed.iter().any(|r| r.approx_eq(&third)) {
                        closed.push(third);
                    }
                }
            }
        }
        frontier_start = known;
    }
    OrthogonalityDiagram::from_rays(closed)
}

/// A 0/1 assignment to the rays of a diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwoValuedMeasure {
    values: Vec<u8>,
}

impl TwoValuedMeasure {
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn value(&self, ray: usize) -> u8 {
        self.values[ray]
    }

    /// The squared-spin reading along `ray` implied by this measure: the
    /// measure marks the spectral projector onto the zero eigenvalue, so the
    /// squared component reads `1 - value`.
    pub fn third_square_reading(&self, ray: usize) -> u8 {
        1 - self.values[ray]
    }
}

/// Independent re-check that `values` is a two-valued measure on `diagram`:
/// binary, exactly one 1 per triad, never two 1s on an orthogonal pair.
pub fn validate_measure(diagram: &OrthogonalityDiagram, values: &[u8]) -> bool {
    if values.len() != diagram.ray_count() {
        return false;
    }
    if values.iter().any(|&v| v > 1) {
        return false;
    }
    for &[a, b, c] in diagram.triads() {
        if values[a] + values[b] + values[c] != 1 {
            return false;
        }
    }
    for &[a, b] in diagram.pairs() {
        if values[a] == 1 && values[b] == 1 {
            return false;
        }
    }
    true
}

/// Immutable search structure: adjacency and decision order.
struct SearchTopology {
    /// For each ray, all rays orthogonal to it (triad mates and bare-pair
    /// partners alike).
    ortho: Vec<Vec<usize>>,
    /// For each ray, the indices of the triads containing it.
    triads_of: Vec<Vec<usize>>,
    triads: Vec<[usize; 3]>,
    /// Decision order: descending triad degree, ascending index on ties.
    order: Vec<usize>,
}

impl SearchTopology {
    fn new(diagram: &OrthogonalityDiagram) -> SearchTopology {
        let n = diagram.ray_count();
        let mut ortho: Vec<Vec<usize>> = vec![Vec::new(); n];
        let link = |map: &mut Vec<Vec<usize>>, a: usize, b: usize| {
            if !map[a].contains(&b) {
                map[a].push(b);
            }
            if !map[b].contains(&a) {
                map[b].push(a);
            }
        };
        for &[a, b, c] in diagram.triads() {
            link(&mut ortho, a, b);
            link(&mut ortho, a, c);
            link(&mut ortho, b, c);
        }
        for &[a, b] in diagram.pairs() {
            link(&mut ortho, a, b);
        }
        let mut triads_of: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (t, &[a, b, c]) in diagram.triads().iter().enumerate() {
            triads_of[a].push(t);
            triads_of[b].push(t);
            triads_of[c].push(t);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            triads_of[b]
                .len()
                .cmp(&triads_of[a].len())
                .then(a.cmp(&b))
        });
        SearchTopology {
            ortho,
            triads_of,
            triads: diagram.triads().to_vec(),
            order,
        }
    }
}

/// Mutable search state for the backtracker.
struct SearchState {
    values: Vec<Option<u8>>,
    trail: Vec<usize>,
    nodes: u64,
}

impl SearchState {
    fn new(n: usize) -> SearchState {
        SearchState {
            values: vec![None; n],
            trail: Vec::with_capacity(n),
            nodes: 0,
        }
    }

    /// Assigns `ray = value` and propagates: a 1 forces 0 on every
    /// orthogonal ray; a triad with two 0s forces a 1 on its remaining
    /// member; a triad of three 0s is a contradiction. Returns `false` on
    /// conflict, leaving the trail to be unwound by the caller.
    fn assign(&mut self, topo: &SearchTopology, ray: usize, value: u8) -> bool {
        let mut work = vec![(ray, value)];
        while let Some((x, v)) = work.pop() {
            if let Some(existing) = self.values[x] {
                if existing != v {
                    return false;
                }
                continue;
            }
            self.values[x] = Some(v);
            self.trail.push(x);
            if v == 1 {
                for &y in &topo.ortho[x] {
                    match self.values[y] {
                        Some(1) => return false,
                        Some(0) => {}
                        None => work.push((y, 0)),
                        Some(_) => unreachable!("values are binary"),
                    }
                }
            }
            for &t in &topo.triads_of[x] {
                let [a, b, c] = topo.triads[t];
                let mut ones = 0;
                let mut zeros = 0;
                let mut open = None;
                for m in [a, b, c] {
                    match self.values[m] {
                        Some(0) => zeros += 1,
                        Some(_) => ones += 1,
                        None => open = Some(m),
                    }
                }
                if ones > 1 || zeros == 3 {
                    return false;
                }
                if zeros == 2 && ones == 0 {
                    if let Some(m) = open {
                        work.push((m, 1));
                    }
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().expect("trail is nonempty above the mark");
            self.values[x] = None;
        }
    }

    /// Depth-first search over the decision order; calls `on_measure` at
    /// every complete assignment and stops early if it returns `false`.
    /// Returns `false` iff the search was cut short. Branches try 1 before 0
    /// so that witnesses carry as many 1s as the ordering allows.
    fn search(
        &mut self,
        topo: &SearchTopology,
        on_measure: &mut impl FnMut(&[Option<u8>]) -> bool,
    ) -> bool {
        self.nodes += 1;
        let next = topo
            .order
            .iter()
            .copied()
            .find(|&x| self.values[x].is_none());
        let Some(x) = next else {
            return on_measure(&self.values);
        };
        for v in [1u8, 0u8] {
            let mark = self.trail.len();
            if self.assign(topo, x, v) && !self.search(topo, on_measure) {
                return false;
            }
            self.undo_to(mark);
        }
        true
    }
}

/// Result of an (optionally capped) measure enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureEnumeration {
    pub measures: Vec<TwoValuedMeasure>,
    /// True iff the search space was fully traversed; a run stopped by the
    /// limit - even one that happened to collect every measure - reports
    /// false.
    pub exhausted: bool,
}

/// Enumerates two-valued measures in the deterministic search order, keeping
/// at most `limit` of them.
pub fn enumerate_two_valued_measures(
    diagram: &OrthogonalityDiagram,
    limit: usize,
) -> MeasureEnumeration {
    let topo = SearchTopology::new(diagram);
    let mut state = SearchState::new(diagram.ray_count());
    let mut measures = Vec::new();
    let exhausted = state.search(&topo, &mut |values| {
        let assignment: Vec<u8> = values
            .iter()
            .map(|v| v.expect("complete assignment"))
            .collect();
        debug_assert!(validate_measure(diagram, &assignment));
        measures.push(TwoValuedMeasure { values: assignment });
        measures.len() < limit
    });
    MeasureEnumeration {
        measures,
        exhausted,
    }
}

/// Outcome of a full colorability search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorabilityCertificate {
    pub colorable: bool,
    /// First measure in search order, if any.
    pub witness: Option<TwoValuedMeasure>,
    /// Number of search-tree nodes visited; deterministic for a given
    /// diagram.
    pub nodes_explored: u64,
    /// Total number of two-valued measures (the search always runs to
    /// exhaustion).
    pub measure_count: u64,
}

/// Decides colorability by exhaustive deterministic search, returning the
/// first witness, the total measure count, and the explored-node count.
pub fn is_colorable(diagram: &OrthogonalityDiagram) -> ColorabilityCertificate {
    let topo = SearchTopology::new(diagram);
    let mut state = SearchState::new(diagram.ray_count());
    let mut witness: Option<TwoValuedMeasure> = None;
    let mut measure_count: u64 = 0;
    state.search(&topo, &mut |values| {
        measure_count += 1;
        if witness.is_none() {
            let assignment: Vec<u8> = values
                .iter()
                .map(|v| v.expect("complete assignment"))
                .collect();
            debug_assert!(validate_measure(diagram, &assignment));
            witness = Some(TwoValuedMeasure { values: assignment });
        }
        true
    });
    ColorabilityCertificate {
        colorable: witness.is_some(),
        witness,
        nodes_explored: state.nodes,
        measure_count,
    }
}

/// Output formats for [`greechie_emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramFormat {
    Dot,
    Ascii,
    Json,
}

impl std::str::FromStr for DiagramFormat {
    type Err = KsError;

    fn from_str(s: &str) -> Result<DiagramFormat, KsError> {
        match s {
            "dot" => Ok(DiagramFormat::Dot),
            "ascii" => Ok(DiagramFormat::Ascii),
            "json" => Ok(DiagramFormat::Json),
            other => Err(KsError::InvalidDiagram(format!(
                "unknown diagram format '{other}' (expected dot, ascii or json)"
            ))),
        }
    }
}

/// Renders a diagram. All three formats are byte-deterministic; the JSON
/// form round-trips through [`diagram_from_json`].
pub fn greechie_emit(diagram: &OrthogonalityDiagram, format: DiagramFormat) -> String {
    match format {
        DiagramFormat::Dot => emit_dot(diagram),
        DiagramFormat::Ascii => emit_ascii(diagram),
        DiagramFormat::Json => {
            serde_json::to_string_pretty(diagram).expect("diagram serialization cannot fail")
        }
    }
}

fn emit_dot(diagram: &OrthogonalityDiagram) -> String {
    let mut out = String::from("graph contexts {\n  node [shape=circle];\n");
    for (i, ray) in diagram.rays().iter().enumerate() {
        let [x, y, z] = ray.components();
        out.push_str(&format!(
            "  r{i} [label=\"{i}\", tooltip=\"({x:.6}, {y:.6}, {z:.6})\"];\n"
        ));
    }
    for (t, &[a, b, c]) in diagram.triads().iter().enumerate() {
        out.push_str(&format!(
            "  subgraph context_{t} {{\n    r{a} -- r{b} -- r{c};\n  }}\n"
        ));
    }
    for &[a, b] in diagram.pairs() {
        out.push_str(&format!("  r{a} -- r{b} [style=dashed];\n"));
    }
    out.push_str("}\n");
    out
}

fn emit_ascii(diagram: &OrthogonalityDiagram) -> String {
    let mut out = String::from("rays:\n");
    for (i, ray) in diagram.rays().iter().enumerate() {
        let [x, y, z] = ray.components();
        out.push_str(&format!("  [{i:>3}] ({x:>10.6}, {y:>10.6}, {z:>10.6})\n"));
    }
    if !diagram.triads().is_empty() {
        out.push_str("contexts:\n");
        for &[a, b, c] in diagram.triads() {
            out.push_str(&format!("  ({a})--({b})--({c})\n"));
        }
    }
    if !diagram.pairs().is_empty() {
        out.push_str("pairs:\n");
        for &[a, b] in diagram.pairs() {
            out.push_str(&format!("  ({a})..({b})\n"));
        }
    }
    out
}

/// Parses the JSON diagram schema `{rays, triads, pairs}`, re-validating
/// orthogonality and index bounds.
pub fn diagram_from_json(text: &str) -> Result<OrthogonalityDiagram, KsError> {
    serde_json::from_str(text).map_err(|e| KsError::DiagramParse(e.to_string()))
}

/// Parses a plain-text ray file: one whitespace-separated component triple
/// per line, `#` starts a comment, blank lines ignored.
pub fn parse_ray_file(text: &str) -> Result<Vec<Ray>, KsError> {
    let mut rays = Vec::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 3 {
            return Err(KsError::RayFileParse {
                line: lineno + 1,
                message: format!("expected 3 components, found {}", fields.len()),
            });
        }
        let mut parsed = [0.0_f64; 3];
        for (slot, field) in parsed.iter_mut().zip(fields.iter()) {
            *slot = field.parse::<f64>().map_err(|e| KsError::RayFileParse {
                line: lineno + 1,
                message: format!("bad component '{field}': {e}"),
            })?;
        }
        let ray = Ray::new(parsed[0], parsed[1], parsed[2]).map_err(|e| KsError::RayFileParse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        rays.push(ray);
    }
    Ok(rays)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    fn ray(x: f64, y: f64, z: f64) -> Ray {
        Ray::new(x, y, z).unwrap()
    }

    /// Exhaustive reference enumeration for small diagrams.
    fn brute_force_measures(diagram: &OrthogonalityDiagram) -> Vec<Vec<u8>> {
        let n = diagram.ray_count();
        assert!(n <= 20, "brute force is for small diagrams");
        let mut found = Vec::new();
        for mask in 0u32..(1u32 << n) {
            let values: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
            if validate_measure(diagram, &values) {
                found.push(values);
            }
        }
        found
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(ray(0.0, 0.0, -2.0).components(), [0.0, 0.0, 1.0]);
        assert_eq!(ray(3.0, 0.0, 0.0).components(), [1.0, 0.0, 0.0]);
        let r = ray(1.0, -1.0, SQRT_2);
        assert_eq!(r.components(), [0.5, -0.5, SQRT_2 / 2.0]);
        // Leading negative flips the whole vector.
        let s = ray(-1.0, 1.0, -SQRT_2);
        assert_eq!(s.components(), [0.5, -0.5, SQRT_2 / 2.0]);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        for k in 0..100 {
            let t = k as f64 * 0.37;
            let r = ray(t.cos(), t.sin(), (t * 1.7).cos());
            let [x, y, z] = r.components();
            assert!(r.approx_eq(&ray(x, y, z)));
        }
    }

    #[test]
    fn zero_and_nonfinite_rays_are_rejected() {
        assert!(matches!(
            Ray::new(0.0, 0.0, 0.0),
            Err(KsError::ZeroRay { .. })
        ));
        assert!(matches!(
            Ray::new(f64::NAN, 1.0, 0.0),
            Err(KsError::NonFiniteRay(_))
        ));
    }

    #[test]
    fn cross_of_parallel_rays_is_none() {
        let a = ray(1.0, 2.0, 3.0);
        let b = ray(-2.0, -4.0, -6.0);
        assert!(a.approx_eq(&b));
        assert!(a.cross(&b).is_none());
        let c = ray(0.0, 1.0, 0.0);
        assert!(a.cross(&c).is_some());
    }

    #[test]
    fn peres_set_has_17_distinct_rays() {
        let rays = peres_directions();
        assert_eq!(rays.len(), 17);
        for i in 0..rays.len() {
            for j in (i + 1)..rays.len() {
                assert!(!rays[i].approx_eq(&rays[j]), "rays {i} and {j} coincide");
            }
        }
        assert!(rays.iter().any(|r| r.approx_eq(&ray(0.0, 1.0, 0.0))));
    }

    #[test]
    fn raw_peres_diagram_shape() {
        let diagram = OrthogonalityDiagram::from_rays(peres_directions());
        assert_eq!(diagram.ray_count(), 17);
        assert_eq!(diagram.triads().len(), 0);
        assert_eq!(diagram.pairs().len(), 14);
    }

    #[test]
    fn two_tripods_share_the_third_axis() {
        let diagram = two_tripod_diagram(FRAC_PI_4).unwrap();
        assert_eq!(diagram.ray_count(), 5);
        assert_eq!(diagram.triads(), &[[0, 1, 2], [2, 3, 4]]);
        assert!(diagram.pairs().is_empty());
        assert!(diagram.rays()[2].approx_eq(&ray(0.0, 0.0, 1.0)));
    }

    #[test]
    fn aligned_tripods_are_rejected() {
        for phi in [0.0, FRAC_PI_2, PI, -FRAC_PI_2, 7.0 * FRAC_PI_2, 1e-12] {
            assert!(
                matches!(
                    two_tripod_diagram(phi),
                    Err(KsError::DegenerateTripods { .. })
                ),
                "phi={phi}"
            );
        }
        assert!(two_tripod_diagram(0.3).is_ok());
    }

    #[test]
    fn closure_completes_a_single_pair() {
        let diagram = orthogonality_closure(&[ray(1.0, 0.0, 0.0), ray(0.0, 1.0, 0.0)]);
        assert_eq!(diagram.ray_count(), 3);
        assert_eq!(diagram.triads(), &[[0, 1, 2]]);
        assert!(diagram.pairs().is_empty());
        assert!(diagram.rays()[2].approx_eq(&ray(0.0, 0.0, 1.0)));
    }

    #[test]
    fn closure_is_a_fixpoint_on_closed_sets() {
        let tripod = orthogonality_closure(&[ray(1.0, 0.0, 0.0), ray(0.0, 1.0, 0.0)]);
        let again = orthogonality_closure(tripod.rays());
        assert!(tripod.approx_eq(&again));
    }

    #[test]
    fn peres_closure_has_57_rays_and_40_triads() {
        let diagram = orthogonality_closure(&peres_directions());
        assert_eq!(diagram.ray_count(), 57);
        assert_eq!(diagram.triads().len(), 40);
        assert_eq!(diagram.pairs().len(), 0);
    }

    #[test]
    fn single_tripod_has_three_measures() {
        let tripod = orthogonality_closure(&[ray(1.0, 0.0, 0.0), ray(0.0, 1.0, 0.0)]);
        let result = enumerate_two_valued_measures(&tripod, usize::MAX);
        assert!(result.exhausted);
        assert_eq!(result.measures.len(), 3);
        for m in &result.measures {
            assert!(validate_measure(&tripod, m.values()));
            assert_eq!(m.values().iter().map(|&v| v as u32).sum::<u32>(), 1);
        }
        let brute = brute_force_measures(&tripod);
        assert_eq!(brute.len(), 3);
    }

    #[test]
    fn two_tripods_have_five_measures() {
        let diagram = two_tripod_diagram(FRAC_PI_4).unwrap();
        let result = enumerate_two_valued_measures(&diagram, usize::MAX);
        assert!(result.exhausted);
        assert_eq!(result.measures.len(), 5);
        let brute = brute_force_measures(&diagram);
        assert_eq!(brute.len(), 5);
        // Same sets, independent of enumeration order.
        for m in &result.measures {
            assert!(brute.contains(&m.values().to_vec()));
        }
    }

    #[test]
    fn limit_caps_enumeration() {
        let diagram = two_tripod_diagram(FRAC_PI_4).unwrap();
        let capped = enumerate_two_valued_measures(&diagram, 2);
        assert_eq!(capped.measures.len(), 2);
        assert!(!capped.exhausted);
        // A limit met exactly at the last measure still reports !exhausted,
        // because the remainder of the tree was never visited.
        let exact = enumerate_two_valued_measures(&diagram, 5);
        assert_eq!(exact.measures.len(), 5);
        assert!(!exact.exhausted);
        let loose = enumerate_two_valued_measures(&diagram, 6);
        assert_eq!(loose.measures.len(), 5);
        assert!(loose.exhausted);
    }

    #[test]
    fn bare_rays_are_unconstrained() {
        // Two non-orthogonal rays: no contexts at all, every assignment is a
        // measure.
        let diagram =
            OrthogonalityDiagram::from_rays(vec![ray(1.0, 0.0, 0.0), ray(1.0, 1.0, 0.0)]);
        assert!(diagram.triads().is_empty());
        assert!(diagram.pairs().is_empty());
        let cert = is_colorable(&diagram);
        assert!(cert.colorable);
        assert_eq!(cert.measure_count, 4);
    }

    #[test]
    fn raw_peres_set_is_colorable() {
        let diagram = OrthogonalityDiagram::from_rays(peres_directions());
        let cert = is_colorable(&diagram);
        assert!(cert.colorable);
        assert_eq!(cert.measure_count, 7296);
        let witness = cert.witness.expect("colorable diagrams carry a witness");
        assert!(validate_measure(&diagram, witness.values()));
    }

    #[test]
    fn closed_peres_set_is_noncolorable() {
        let diagram = orthogonality_closure(&peres_directions());
        let cert = is_colorable(&diagram);
        assert!(!cert.colorable);
        assert!(cert.witness.is_none());
        assert_eq!(cert.measure_count, 0);
        assert!(cert.nodes_explored > 0);
        let enumeration = enumerate_two_valued_measures(&diagram, usize::MAX);
        assert!(enumeration.exhausted);
        assert!(enumeration.measures.is_empty());
    }

    #[test]
    fn search_is_deterministic() {
        let diagram = orthogonality_closure(&peres_directions());
        let a = is_colorable(&diagram);
        let b = is_colorable(&diagram);
        assert_eq!(a, b);
        let small = two_tripod_diagram(1.1).unwrap();
        let c = is_colorable(&small);
        let d = is_colorable(&small);
        assert_eq!(c, d);
        assert_eq!(c.witness, d.witness);
    }

    #[test]
    fn measure_readings_complement_the_marked_ray() {
        let diagram = two_tripod_diagram(FRAC_PI_4).unwrap();
        let result = enumerate_two_valued_measures(&diagram, usize::MAX);
        for m in &result.measures {
            for i in 0..diagram.ray_count() {
                assert_eq!(m.third_square_reading(i), 1 - m.value(i));
            }
        }
    }

    #[test]
    fn ascii_rendering_of_glued_tripods() {
        let diagram = two_tripod_diagram(FRAC_PI_4).unwrap();
        let text = greechie_emit(&diagram, DiagramFormat::Ascii);
        assert!(text.contains("(0)--(1)--(2)"));
        assert!(text.contains("(2)--(3)--(4)"));
        assert!(!text.contains("pairs:"));
        assert_eq!(text.matches("--").count(), 4);
    }

    #[test]
    fn dot_rendering_of_a_single_tripod() {
        let tripod = orthogonality_closure(&[ray(1.0, 0.0, 0.0), ray(0.0, 1.0, 0.0)]);
        let text = greechie_emit(&tripod, DiagramFormat::Dot);
        assert!(text.starts_with("graph contexts {"));
        assert_eq!(text.matches("subgraph").count(), 1);
        for node in ["r0", "r1", "r2"] {
            assert!(text.contains(&format!("{node} [label=")));
        }
        assert!(!text.contains("style=dashed"));
    }

    #[test]
    fn dot_rendering_marks_bare_pairs() {
        let diagram = OrthogonalityDiagram::from_rays(peres_directions());
        let text = greechie_emit(&diagram, DiagramFormat::Dot);
        assert_eq!(text.matches("style=dashed").count(), 14);
        assert_eq!(text.matches("subgraph").count(), 0);
    }

    #[test]
    fn json_round_trip_preserves_the_diagram() {
        let diagram = two_tripod_diagram(0.9).unwrap();
        let json = greechie_emit(&diagram, DiagramFormat::Json);
        let back = diagram_from_json(&json).unwrap();
        assert!(diagram.approx_eq(&back));
        assert_eq!(diagram, back);
    }

    #[test]
    fn malformed_diagram_json_is_rejected() {
        assert!(diagram_from_json("not json").is_err());
        // Out-of-range triad index.
        let bad_index = r#"{"rays":[[1,0,0],[0,1,0],[0,0,1]],"triads":[[0,1,9]],"pairs":[]}"#;
        assert!(matches!(
            diagram_from_json(bad_index),
            Err(KsError::DiagramParse(_))
        ));
        // Non-orthogonal triad.
        let skew = r#"{"rays":[[1,0,0],[0.8,0.6,0],[0,0,1]],"triads":[[0,1,2]],"pairs":[]}"#;
        assert!(diagram_from_json(skew).is_err());
        // Duplicate rays.
        let dup = r#"{"rays":[[1,0,0],[2,0,0]],"triads":[],"pairs":[]}"#;
        assert!(diagram_from_json(dup).is_err());
    }

    #[test]
    fn ray_file_parsing() {
        let text = "\
# a tripod, with trailing comments
1 0 0
0 1 0   # second axis
0\t0\t1

# done
";
        let rays = parse_ray_file(text).unwrap();
        assert_eq!(rays.len(), 3);
        assert!(rays[2].approx_eq(&ray(0.0, 0.0, 1.0)));
    }

    #[test]
    fn ray_file_errors_carry_line_numbers() {
        let two_fields = parse_ray_file("1 0 0\n0 1\n").unwrap_err();
        assert!(matches!(two_fields, KsError::RayFileParse { line: 2, .. }));
        let bad_float = parse_ray_file("1 0 zero\n").unwrap_err();
        assert!(matches!(bad_float, KsError::RayFileParse { line: 1, .. }));
        let zero_ray = parse_ray_file("# header\n0 0 0\n").unwrap_err();
        assert!(matches!(zero_ray, KsError::RayFileParse { line: 2, .. }));
    }

    #[test]
    fn format_names_parse() {
        assert_eq!("dot".parse::<DiagramFormat>().unwrap(), DiagramFormat::Dot);
        assert_eq!(
            "ascii".parse::<DiagramFormat>().unwrap(),
            DiagramFormat::Ascii
        );
        assert_eq!(
            "json".parse::<DiagramFormat>().unwrap(),
            DiagramFormat::Json
        );
        assert!("svg".parse::<DiagramFormat>().is_err());
    }

    proptest! {
        #[test]
        fn prop_canonicalization_ignores_scale(
            x in -5.0_f64..5.0,
            y in -5.0_f64..5.0,
            z in -5.0_f64..5.0,
            s in prop::sample::select(vec![-100.0, -2.5, -1.0, 0.01, 0.5, 1.0, 3.0, 1000.0]),
        ) {
            prop_assume!(x * x + y * y + z * z > 1e-6);
            let a = Ray::new(x, y, z).unwrap();
            let b = Ray::new(s * x, s * y, s * z).unwrap();
            prop_assert!(a.approx_eq(&b));
        }
    }
}
