//! Open-book structures: rectangular pages glued along one-dimensional
//! bindings, plus metric graphs and the product construction that turns a
//! graph into a book of width L.
//!
//! Values are immutable after construction and all operations here are pure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A side length: finite and positive, or infinite. Infinite lengths are a
/// distinguished value, never a large float; numerics require truncation
/// first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Finite(f64),
    Infinite,
}

impl Extent {
    pub fn is_finite(self) -> bool {
        matches!(self, Extent::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extent::Finite(v) => Some(v),
            Extent::Infinite => None,
        }
    }

    pub fn is_positive(self) -> bool {
        match self {
            Extent::Finite(v) => v > 0.0 && v.is_finite(),
            Extent::Infinite => true,
        }
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Finite(v) => write!(f, "{v}"),
            Extent::Infinite => write!(f, "inf"),
        }
    }
}

/// One-dimensional gluing locus, isometric to [0, length].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binding {
    pub id: String,
    #[serde(with = "crate::io::extent_serde")]
    pub length: Extent,
}

/// Rectangular page, isometric to [0, lx] x [0, ly].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Page {
    pub id: String,
    #[serde(with = "crate::io::extent_serde")]
    pub lx: Extent,
    #[serde(with = "crate::io::extent_serde")]
    pub ly: Extent,
}

/// The four sides of a page. South/North run along x (length lx) at y = 0 and
/// y = ly; West/East run along y (length ly) at x = 0 and x = lx.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    South,
    North,
    West,
    East,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::South, Side::North, Side::West, Side::East];

    /// Whether this side runs along the x axis.
    pub fn is_horizontal(self) -> bool {
        matches!(self, Side::South | Side::North)
    }

    /// Sides sharing a corner with `self`.
    pub fn is_adjacent(self, other: Side) -> bool {
        self != other && self.is_horizontal() != other.is_horizontal()
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Side::South => "South",
            Side::North => "North",
            Side::West => "West",
            Side::East => "East",
        };
        write!(f, "{s}")
    }
}

/// `Reversed` means the side parametrization runs opposite to the binding
/// parametrization (the encoding used for Moebius-type gluings).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Reversed,
}

/// Identification of one page side with a binding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    pub page: String,
    pub side: Side,
    pub binding: String,
    #[serde(default = "forward")]
    pub orientation: Orientation,
}

fn forward() -> Orientation {
    Orientation::Forward
}

/// An open book: pages, bindings, and the attachments gluing them.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Book {
    pub pages: Vec<Page>,
    pub bindings: Vec<Binding>,
    pub attachments: Vec<Attachment>,
}

/// A single violated invariant, addressed to the offending entity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub entity: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

/// Outcome of `validate_book`: violations are data, not failures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<(), Error> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Validation(self.violations))
        }
    }
}

impl Book {
    pub fn page(&self, id: &str) -> Option<&Page> {
        self.pages.iter().find(|p| p.id == id)
    }

    pub fn binding(&self, id: &str) -> Option<&Binding> {
        self.bindings.iter().find(|b| b.id == id)
    }

    /// Length of a page side.
    pub fn side_length(page: &Page, side: Side) -> Extent {
        if side.is_horizontal() {
            page.lx
        } else {
            page.ly
        }
    }

    /// Whether the side exists: the North (resp. East) side sits at y = ly
    /// (resp. x = lx), so it is absent when that coordinate is infinite.
    pub fn side_exists(page: &Page, side: Side) -> bool {
        match side {
            Side::South | Side::West => true,
            Side::North => page.ly.is_finite(),
            Side::East => page.lx.is_finite(),
        }
    }

    pub fn is_compact(&self) -> bool {
        self.pages.iter().all(|p| p.lx.is_finite() && p.ly.is_finite())
            && self.bindings.iter().all(|b| b.length.is_finite())
    }

    pub fn validate(&self) -> ValidationReport {
        validate_book(self)
    }
}

/// Checks every book invariant; the report names each offending entity.
pub fn validate_book(book: &Book) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push = |entity: String, message: String| violations.push(Violation { entity, message });

    let mut page_ids = BTreeSet::new();
    for page in &book.pages {
        if !page_ids.insert(page.id.as_str()) {
            push(format!("pages[{}]", page.id), "duplicate page id".into());
        }
        if !page.lx.is_positive() || !page.ly.is_positive() {
            push(format!("pages[{}]", page.id), "side lengths must be positive".into());
        }
    }
    let mut binding_ids = BTreeSet::new();
    for binding in &book.bindings {
        if !binding_ids.insert(binding.id.as_str()) {
            push(format!("bindings[{}]", binding.id), "duplicate binding id".into());
        }
        if !binding.length.is_positive() {
            push(format!("bindings[{}]", binding.id), "length must be positive".into());
        }
    }

    // Attachment references, lengths, and per-side multiplicity.
    let mut side_attachments: BTreeMap<(&str, Side), usize> = BTreeMap::new();
    let mut incident: BTreeSet<&str> = BTreeSet::new();
    for (idx, att) in book.attachments.iter().enumerate() {
        let entity = format!("attachments[{idx}]");
        let page = match book.page(&att.page) {
            Some(p) => p,
            None => {
                push(entity, format!("unknown page id '{}'", att.page));
                continue;
            }
        };
        let binding = match book.binding(&att.binding) {
            Some(b) => b,
            None => {
                push(entity, format!("unknown binding id '{}'", att.binding));
                continue;
            }
        };
        incident.insert(binding.id.as_str());
        if !Book::side_exists(page, att.side) {
            push(
                entity.clone(),
                format!("side {} of page {} lies at infinity and cannot be attached", att.side, page.id),
            );
            continue;
        }
        let side_len = Book::side_length(page, att.side);
        if side_len != binding.length {
            push(
                entity.clone(),
                format!(
                    "length mismatch: side {} of page {} has length {} but binding {} has length {}",
                    att.side, page.id, side_len, binding.id, binding.length
                ),
            );
        }
        *side_attachments.entry((page.id.as_str(), att.side)).or_insert(0) += 1;
    }

    for page in &book.pages {
        for side in Side::ALL {
            if !Book::side_exists(page, side) {
                continue;
            }
            let count = side_attachments.get(&(page.id.as_str(), side)).copied().unwrap_or(0);
            let finite = Book::side_length(page, side).is_finite();
            if finite && count != 1 {
                push(
                    format!("pages[{}].{side}", page.id),
                    format!("finite side must have exactly one attachment, found {count}"),
                );
            }
            if !finite && count > 1 {
                push(
                    format!("pages[{}].{side}", page.id),
                    format!("infinite side may have at most one attachment, found {count}"),
                );
            }
        }
    }

    // Conical pages: one binding on two consecutive sides of the same page.
    // Opposite-side self-identification (cylinder, torus) is allowed.
    for page in &book.pages {
        let of_page: Vec<&Attachment> =
            book.attachments.iter().filter(|a| a.page == page.id).collect();
        for (i, a) in of_page.iter().enumerate() {
            for b in of_page.iter().skip(i + 1) {
                if a.binding == b.binding && a.side.is_adjacent(b.side) {
                    push(
                        format!("pages[{}]", page.id),
                        format!(
                            "conical page: binding {} attached to consecutive sides {} and {}",
                            a.binding, a.side, b.side
                        ),
                    );
                }
            }
        }
    }

    for binding in &book.bindings {
        if !incident.contains(binding.id.as_str()) {
            push(
                format!("bindings[{}]", binding.id),
                "binding has no incident page".into(),
            );
        }
    }

    ValidationReport { violations }
}

/// Partition of the pages by the transitive closure of "share a binding".
/// Each component is returned as a standalone sub-book.
pub fn connected_components(book: &Book) -> Result<Vec<Book>, Error> {
    book.validate().into_result()?;
    let n = book.pages.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    let page_index: BTreeMap<&str, usize> = book
        .pages
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    let mut by_binding: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for att in &book.attachments {
        by_binding
            .entry(att.binding.as_str())
            .or_default()
            .push(page_index[att.page.as_str()]);
    }
    for pages in by_binding.values() {
        for w in pages.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut component_of = vec![0usize; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        let c = match roots.iter().position(|&x| x == r) {
            Some(c) => c,
            None => {
                roots.push(r);
                roots.len() - 1
            }
        };
        component_of[i] = c;
    }
    let mut components = vec![Book::default(); roots.len()];
    for (i, page) in book.pages.iter().enumerate() {
        components[component_of[i]].pages.push(page.clone());
    }
    for att in &book.attachments {
        let c = component_of[page_index[att.page.as_str()]];
        components[c].attachments.push(att.clone());
    }
    for (c, sub) in components.iter_mut().enumerate() {
        let used: BTreeSet<&str> = sub.attachments.iter().map(|a| a.binding.as_str()).collect();
        sub.bindings = book
            .bindings
            .iter()
            .filter(|b| used.contains(b.id.as_str()))
            .cloned()
            .collect();
        let _ = c;
    }
    Ok(components)
}

/// Lower bound on the binding lengths: half the minimum of the shortest
/// binding and 1. Always at most 1/2.
pub fn min_binding_length(book: &Book) -> f64 {
    let shortest = book
        .bindings
        .iter()
        .filter_map(|b| b.length.finite())
        .fold(f64::INFINITY, f64::min);
    0.5 * shortest.min(1.0)
}

/// The sub-book of pages that are finite and all of whose attached bindings
/// have finite length. May be empty.
pub fn compact_core(book: &Book) -> Result<Book, Error> {
    book.validate().into_result()?;
    let keep: BTreeSet<&str> = book
        .pages
        .iter()
        .filter(|p| {
            p.lx.is_finite()
                && p.ly.is_finite()
                && book
                    .attachments
                    .iter()
                    .filter(|a| a.page == p.id)
                    .all(|a| book.binding(&a.binding).map_or(false, |b| b.length.is_finite()))
        })
        .map(|p| p.id.as_str())
        .collect();
    let pages: Vec<Page> = book.pages.iter().filter(|p| keep.contains(p.id.as_str())).cloned().collect();
    let attachments: Vec<Attachment> = book
        .attachments
        .iter()
        .filter(|a| keep.contains(a.page.as_str()))
        .cloned()
        .collect();
    let used: BTreeSet<&str> = attachments.iter().map(|a| a.binding.as_str()).collect();
    let bindings = book
        .bindings
        .iter()
        .filter(|b| used.contains(b.id.as_str()))
        .cloned()
        .collect();
    Ok(Book { pages, bindings, attachments })
}

/// Metric graph: vertices and edges with positive (possibly infinite)
/// lengths. An infinite edge runs from `from` towards `to`; its far endpoint
/// is a pure label and must not be shared with any other edge end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    #[serde(with = "crate::io::extent_serde")]
    pub length: Extent,
}

impl GraphSpec {
    pub fn validate(&self) -> Result<(), Error> {
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v.as_str()) {
                return Err(Error::Topology(format!("duplicate vertex id '{v}'")));
            }
        }
        let mut edge_ids = BTreeSet::new();
        for e in &self.edges {
            if !edge_ids.insert(e.id.as_str()) {
                return Err(Error::Topology(format!("duplicate edge id '{}'", e.id)));
            }
            for v in [&e.from, &e.to] {
                if !seen.contains(v.as_str()) {
                    return Err(Error::Topology(format!(
                        "edge {} references unknown vertex '{v}'",
                        e.id
                    )));
                }
            }
            if !e.length.is_positive() {
                return Err(Error::Topology(format!("edge {} has nonpositive length", e.id)));
            }
        }
        // Far endpoints of infinite edges must be exclusive labels.
        let mut end_uses: BTreeMap<&str, usize> = BTreeMap::new();
        for e in &self.edges {
            *end_uses.entry(e.from.as_str()).or_insert(0) += 1;
            *end_uses.entry(e.to.as_str()).or_insert(0) += 1;
        }
        for e in &self.edges {
            if !e.length.is_finite() && end_uses[e.to.as_str()] > 1 {
                return Err(Error::Topology(format!(
                    "edge {} is infinite, so its far endpoint '{}' must not be shared",
                    e.id, e.to
                )));
            }
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        if self.edges.is_empty() {
            return self.vertices.len() <= 1;
        }
        let index: BTreeMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            let (a, b) = (index[e.from.as_str()], index[e.to.as_str()]);
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![index[self.edges[0].from.as_str()]];
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            stack.extend(adj[v].iter().copied());
        }
        // Vertices that only label infinite ends are reached through their edge.
        seen.iter().all(|&s| s)
    }

    /// Vertices reachable at finite distance (excludes far labels of
    /// infinite edges).
    pub fn core_vertices(&self) -> BTreeSet<String> {
        let mut far: BTreeSet<&str> = BTreeSet::new();
        for e in &self.edges {
            if !e.length.is_finite() {
                far.insert(e.to.as_str());
            }
        }
        self.vertices
            .iter()
            .filter(|v| !far.contains(v.as_str()))
            .cloned()
            .collect()
    }
}

/// Naming scheme used by `graph_based_book`: the transverse binding of vertex
/// `v` is `v`, and edge `e` contributes lateral bindings `e.lo` / `e.hi`.
pub fn graph_based_book(graph: &GraphSpec, width: f64) -> Result<Book, Error> {
    graph.validate()?;
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::Topology(format!("width must be positive, got {width}")));
    }
    if !graph.is_connected() {
        return Err(Error::Topology("graph is not connected".into()));
    }
    let mut book = Book::default();
    let mut vertex_has_binding: BTreeSet<&str> = BTreeSet::new();
    let core = graph.core_vertices();
    for v in &graph.vertices {
        if core.contains(v) {
            book.bindings.push(Binding {
                id: v.clone(),
                length: Extent::Finite(width),
            });
            vertex_has_binding.insert(v.as_str());
        }
    }
    for e in &graph.edges {
        book.pages.push(Page {
            id: e.id.clone(),
            lx: e.length,
            ly: Extent::Finite(width),
        });
        book.attachments.push(Attachment {
            page: e.id.clone(),
            side: Side::West,
            binding: e.from.clone(),
            orientation: Orientation::Forward,
        });
        if e.length.is_finite() && vertex_has_binding.contains(e.to.as_str()) {
            book.attachments.push(Attachment {
                page: e.id.clone(),
                side: Side::East,
                binding: e.to.clone(),
                orientation: Orientation::Forward,
            });
        }
        if e.length.is_finite() {
            for (side, suffix) in [(Side::South, "lo"), (Side::North, "hi")] {
                let id = format!("{}.{suffix}", e.id);
                book.bindings.push(Binding { id: id.clone(), length: e.length });
                book.attachments.push(Attachment {
                    page: e.id.clone(),
                    side,
                    binding: id,
                    orientation: Orientation::Forward,
                });
            }
        }
    }
    book.validate().into_result()?;
    Ok(book)
}

/// A truncated book plus the metadata needed to treat the cut as artificial:
/// which bindings were created (or shortened) by the cut, and which page axes
/// were originally infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedBook {
    pub book: Book,
    pub artificial_bindings: BTreeSet<String>,
    /// Page id -> axes that were infinite before truncation.
    pub truncated_axes: BTreeMap<String, Vec<Axis>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Replaces every infinite length by `cutoff`. Newly finite sides without an
/// attachment receive a fresh private binding (a free side); shared infinite
/// bindings become shared finite ones. Idempotent for fixed `cutoff`.
pub fn truncate_book(book: &Book, cutoff: f64) -> Result<TruncatedBook, Error> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::Topology(format!("cutoff must be positive, got {cutoff}")));
    }
    book.validate().into_result()?;
    let mut out = book.clone();
    let mut artificial = BTreeSet::new();
    let mut axes: BTreeMap<String, Vec<Axis>> = BTreeMap::new();
    for binding in &mut out.bindings {
        if !binding.length.is_finite() {
            binding.length = Extent::Finite(cutoff);
            artificial.insert(binding.id.clone());
        }
    }
    let attached: BTreeSet<(String, Side)> = out
        .attachments
        .iter()
        .map(|a| (a.page.clone(), a.side))
        .collect();
    let mut fresh = Vec::new();
    for page in &mut out.pages {
        let mut cut = Vec::new();
        if !page.lx.is_finite() {
            page.lx = Extent::Finite(cutoff);
            cut.push(Axis::X);
        }
        if !page.ly.is_finite() {
            page.ly = Extent::Finite(cutoff);
            cut.push(Axis::Y);
        }
        if !cut.is_empty() {
            axes.insert(page.id.clone(), cut.clone());
        }
        // Sides that just became finite (or always were, on a truncated page)
        // and have no attachment get a free private binding.
        for side in Side::ALL {
            if attached.contains(&(page.id.clone(), side)) {
                continue;
            }
            let len = Book::side_length(page, side);
            if let Some(len) = len.finite() {
                let id = format!("{}.{}", page.id, side.to_string().to_lowercase());
                fresh.push((page.id.clone(), side, id.clone(), len));
                artificial.insert(id);
            }
        }
    }
    for (page, side, id, len) in fresh {
        out.bindings.push(Binding { id: id.clone(), length: Extent::Finite(len) });
        out.attachments.push(Attachment {
            page,
            side,
            binding: id,
            orientation: Orientation::Forward,
        });
    }
    out.validate().into_result()?;
    Ok(TruncatedBook {
        book: out,
        artificial_bindings: artificial,
        truncated_axes: axes,
    })
}

/// Graph analogue of `truncate_book`: infinite edges become edges of length
/// `cutoff` and their far endpoints are reported as artificial vertices.
pub fn truncate_graph(graph: &GraphSpec, cutoff: f64) -> Result<(GraphSpec, BTreeSet<String>), Error> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::Topology(format!("cutoff must be positive, got {cutoff}")));
    }
    graph.validate()?;
    let mut out = graph.clone();
    let mut artificial = BTreeSet::new();
    for e in &mut out.edges {
        if !e.length.is_finite() {
            e.length = Extent::Finite(cutoff);
            artificial.insert(e.to.clone());
        }
    }
    Ok((out, artificial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn torus_book_validates() {
        let book = presets::torus_book(1.0, 1.0);
        assert!(validate_book(&book).is_ok());
    }

    #[test]
    fn conical_page_is_rejected() {
        let book = Book {
            pages: vec![Page { id: "P".into(), lx: Extent::Finite(1.0), ly: Extent::Finite(1.0) }],
            bindings: vec![
                Binding { id: "B".into(), length: Extent::Finite(1.0) },
                Binding { id: "N".into(), length: Extent::Finite(1.0) },
                Binding { id: "E".into(), length: Extent::Finite(1.0) },
            ],
            attachments: vec![
                Attachment { page: "P".into(), side: Side::South, binding: "B".into(), orientation: Orientation::Forward },
                Attachment { page: "P".into(), side: Side::West, binding: "B".into(), orientation: Orientation::Forward },
                Attachment { page: "P".into(), side: Side::North, binding: "N".into(), orientation: Orientation::Forward },
                Attachment { page: "P".into(), side: Side::East, binding: "E".into(), orientation: Orientation::Forward },
            ],
        };
        let report = validate_book(&book);
        assert!(report.violations.iter().any(|v| v.message.contains("conical")));
    }

    #[test]
    fn length_mismatch_is_reported() {
        let book = Book {
            pages: vec![Page { id: "P".into(), lx: Extent::Finite(2.0), ly: Extent::Infinite }],
            bindings: vec![Binding { id: "B".into(), length: Extent::Finite(1.0) }],
            attachments: vec![Attachment {
                page: "P".into(),
                side: Side::South,
                binding: "B".into(),
                orientation: Orientation::Forward,
            }],
        };
        let report = validate_book(&book);
        assert!(report.violations.iter().any(|v| v.message.contains("length mismatch")));
    }

    #[test]
    fn star_book_is_connected() {
        let book = presets::star_book(3, 1.0);
        assert!(validate_book(&book).is_ok());
        let components = connected_components(&book).unwrap();
        assert_eq!(components.len(), 1);
    }

    #[test]
    fn dumbbell_book_is_connected() {
        let book = graph_based_book(&presets::dumbbell_graph(2.0, 1.0), 0.5).unwrap();
        assert_eq!(connected_components(&book).unwrap().len(), 1);
    }

    #[test]
    fn disjoint_squares_split_into_two_components() {
        let mut book = Book::default();
        for tag in ["A", "B"] {
            book.pages.push(Page { id: tag.into(), lx: Extent::Finite(1.0), ly: Extent::Finite(1.0) });
            for side in Side::ALL {
                let id = format!("{tag}.{side}");
                book.bindings.push(Binding { id: id.clone(), length: Extent::Finite(1.0) });
                book.attachments.push(Attachment {
                    page: tag.into(),
                    side,
                    binding: id,
                    orientation: Orientation::Forward,
                });
            }
        }
        assert_eq!(connected_components(&book).unwrap().len(), 2);
    }

    #[test]
    fn min_binding_length_examples() {
        let mk = |lengths: &[f64]| Book {
            pages: vec![],
            bindings: lengths
                .iter()
                .enumerate()
                .map(|(i, &l)| Binding { id: format!("B{i}"), length: Extent::Finite(l) })
                .collect(),
            attachments: vec![],
        };
        assert_eq!(min_binding_length(&mk(&[3.0, 0.4])), 0.2);
        assert_eq!(min_binding_length(&mk(&[5.0, 7.0])), 0.5);
        assert_eq!(min_binding_length(&mk(&[1.0])), 0.5);
    }

    #[test]
    fn compact_core_examples() {
        let torus = presets::torus_book(1.0, 1.0);
        assert_eq!(compact_core(&torus).unwrap(), torus);

        let star = presets::star_book(3, 1.0);
        assert!(compact_core(&star).unwrap().pages.is_empty());

        let tadpole = graph_based_book(&presets::tadpole_graph(std::f64::consts::TAU), 1.0).unwrap();
        let core = compact_core(&tadpole).unwrap();
        assert_eq!(core.pages.len(), 1);
        assert_eq!(core.pages[0].id, "loop");
    }

    #[test]
    fn graph_based_book_binding_counts() {
        let triangle = graph_based_book(&presets::triangle_graph(1.0), 0.7).unwrap();
        assert_eq!(triangle.pages.len(), 3);
        assert_eq!(triangle.bindings.len(), 9);

        let single = GraphSpec {
            vertices: vec!["a".into(), "b".into()],
            edges: vec![Edge { id: "e".into(), from: "a".into(), to: "b".into(), length: Extent::Finite(2.0) }],
        };
        let book = graph_based_book(&single, 1.0).unwrap();
        assert_eq!(book.pages.len(), 1);
        assert_eq!(book.bindings.len(), 4);
    }

    #[test]
    fn loop_edge_gives_cylinder_page() {
        let book = graph_based_book(&presets::loop_graph(2.0), 1.0).unwrap();
        assert!(validate_book(&book).is_ok());
        let on_vertex: Vec<&Attachment> =
            book.attachments.iter().filter(|a| a.binding == "v").collect();
        assert_eq!(on_vertex.len(), 2);
        assert!(!on_vertex[0].side.is_adjacent(on_vertex[1].side));
    }

    #[test]
    fn truncation_creates_free_far_sides_and_is_idempotent() {
        let star = presets::star_book(3, 1.0);
        let cut = truncate_book(&star, 20.0).unwrap();
        assert!(cut.book.is_compact());
        for page in &cut.book.pages {
            assert_eq!(page.lx, Extent::Finite(20.0));
            assert_eq!(page.ly, Extent::Finite(1.0));
        }
        assert_eq!(cut.truncated_axes.len(), 3);
        let again = truncate_book(&cut.book, 20.0).unwrap();
        assert_eq!(again.book, cut.book);
        assert!(again.artificial_bindings.is_empty());
    }

    #[test]
    fn half_plane_truncates_to_two_shared_squares() {
        let book = presets::half_plane_book();
        assert!(validate_book(&book).is_ok());
        let cut = truncate_book(&book, 10.0).unwrap();
        assert_eq!(cut.book.pages.len(), 2);
        for page in &cut.book.pages {
            assert_eq!(page.lx, Extent::Finite(10.0));
            assert_eq!(page.ly, Extent::Finite(10.0));
        }
        let shared = cut.book.binding("seam").unwrap();
        assert_eq!(shared.length, Extent::Finite(10.0));
        let incident: Vec<_> = cut.book.attachments.iter().filter(|a| a.binding == "seam").collect();
        assert_eq!(incident.len(), 2);
    }
}
