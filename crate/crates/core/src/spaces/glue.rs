//! Gluing scaled spaces at points, with the quotient metric evaluated
//! through the glue points ("portals").
//!
//! Pieces meet only at single points, so any route between different pieces
//! is a concatenation of within-piece legs joined at portals. Distances are
//! therefore exact: a within-leaf leg to each portal of the leaf, plus a
//! precomputed portal-to-portal shortest path table.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{dijkstra, AdjacencyGraph};
use crate::space::{FiniteMetricSpace, Metric, PointId, PointMeta};

/// Hard cap on glue points; the portal table is quadratic in their number.
pub const PORTAL_CAP: usize = 4096;

/// A prototype space at a fixed scale; all leaves of a class are isometric.
#[derive(Clone, Debug)]
pub struct LeafClass {
    pub proto: usize,
    pub scale: f64,
}

/// One scaled copy of a prototype inside the glued space.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub class: usize,
    /// Global id of each prototype point.
    pub ids: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct GluedMetric {
    protos: Vec<Arc<FiniteMetricSpace>>,
    classes: Vec<LeafClass>,
    leaves: Vec<Leaf>,
    member_start: Vec<u32>,
    members: Vec<(u32, u32)>,
    portals: Vec<PointId>,
    /// Per leaf: (local id, portal index).
    leaf_portals: Vec<Vec<(u32, u32)>>,
    portal_dist: Vec<f64>,
}

/// Pieces with scale factors, and landmark identifications between them.
#[derive(Clone, Debug, Default)]
pub struct GluingSpec {
    pub pieces: Vec<(Arc<FiniteMetricSpace>, f64)>,
    /// `(piece, landmark, piece, landmark)`.
    pub identifications: Vec<(usize, String, usize, String)>,
}

impl GluingSpec {
    pub fn piece(&mut self, space: Arc<FiniteMetricSpace>, scale: f64) -> usize {
        self.pieces.push((space, scale));
        self.pieces.len() - 1
    }

    pub fn identify(&mut self, a: usize, la: &str, b: usize, lb: &str) {
        self.identifications
            .push((a, la.to_string(), b, lb.to_string()));
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so that the representative is deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Glues the pieces of `spec`. Glued pieces are flattened, so the result is
/// always a quotient of scaled coordinate or matrix prototypes.
pub fn glue(spec: &GluingSpec) -> Result<FiniteMetricSpace> {
    glue_with_ids(spec).map(|(space, _)| space)
}

/// Like [`glue`], also returning for each piece the global id of every
/// piece point.
pub fn glue_with_ids(spec: &GluingSpec) -> Result<(FiniteMetricSpace, Vec<Vec<PointId>>)> {
    if spec.pieces.is_empty() {
        return Err(Error::IllFormedGluing("no pieces".into()));
    }
    let mut offsets = Vec::with_capacity(spec.pieces.len());
    let mut total = 0usize;
    for (k, (piece, scale)) in spec.pieces.iter().enumerate() {
        if !(*scale > 0.0 && scale.is_finite()) {
            return Err(Error::IllFormedGluing(format!(
                "piece {k} has scale {scale}"
            )));
        }
        offsets.push(total);
        total += piece.len();
    }
    if total > u32::MAX as usize {
        return Err(Error::ResourceCap(format!("{total} points")));
    }
    let mut uf = UnionFind::new(total);
    for (a, la, b, lb) in &spec.identifications {
        let lookup = |piece: usize, name: &str| -> Result<usize> {
            let (space, _) = spec
                .pieces
                .get(piece)
                .ok_or_else(|| Error::IllFormedGluing(format!("no piece {piece}")))?;
            let id = space.landmark(name).map_err(|_| {
                Error::IllFormedGluing(format!("piece {piece} has no landmark `{name}`"))
            })?;
            Ok(offsets[piece] + id)
        };
        uf.union(lookup(*a, la)?, lookup(*b, lb)?);
    }
    let mut new_id = vec![u32::MAX; total];
    let mut root_id: HashMap<usize, u32> = HashMap::new();
    let mut n = 0u32;
    for g in 0..total {
        let r = uf.find(g);
        let id = *root_id.entry(r).or_insert_with(|| {
            n += 1;
            n - 1
        });
        new_id[g] = id;
    }
    let n = n as usize;

    let mut protos: Vec<Arc<FiniteMetricSpace>> = Vec::new();
    let proto_index =
        |p: &Arc<FiniteMetricSpace>, protos: &mut Vec<Arc<FiniteMetricSpace>>| -> usize {
            match protos.iter().position(|q| Arc::ptr_eq(q, p)) {
                Some(i) => i,
                None => {
                    protos.push(p.clone());
                    protos.len() - 1
                }
            }
        };
    let mut classes: Vec<LeafClass> = Vec::new();
    let class_index = |proto: usize, scale: f64, classes: &mut Vec<LeafClass>| -> usize {
        match classes
            .iter()
            .position(|c| c.proto == proto && c.scale.to_bits() == scale.to_bits())
        {
            Some(i) => i,
            None => {
                classes.push(LeafClass { proto, scale });
                classes.len() - 1
            }
        }
    };
    let mut leaves = Vec::new();
    for (k, (piece, scale)) in spec.pieces.iter().enumerate() {
        let off = offsets[k];
        match piece.metric() {
            Metric::Glued(inner) => {
                for leaf in &inner.leaves {
                    let c = &inner.classes[leaf.class];
                    let proto = proto_index(&inner.protos[c.proto], &mut protos);
                    let class = class_index(proto, c.scale * scale, &mut classes);
                    let ids = leaf.ids.iter().map(|&g| new_id[off + g as usize]).collect();
                    leaves.push(Leaf { class, ids });
                }
            }
            _ => {
                let proto = proto_index(piece, &mut protos);
                let class = class_index(proto, *scale, &mut classes);
                let ids = (0..piece.len()).map(|i| new_id[off + i]).collect();
                leaves.push(Leaf { class, ids });
            }
        }
    }

    // memberships in CSR form
    let mut counts = vec![0u32; n + 1];
    for leaf in &leaves {
        for &g in &leaf.ids {
            counts[g as usize + 1] += 1;
        }
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let member_start = counts.clone();
    let mut fill = counts;
    let mut members = vec![(0u32, 0u32); member_start[n] as usize];
    for (li, leaf) in leaves.iter().enumerate() {
        for (local, &g) in leaf.ids.iter().enumerate() {
            let slot = &mut fill[g as usize];
            members[*slot as usize] = (li as u32, local as u32);
            *slot += 1;
        }
    }

    let portals: Vec<PointId> = (0..n)
        .filter(|&g| member_start[g + 1] - member_start[g] > 1)
        .collect();
    if portals.len() > PORTAL_CAP {
        return Err(Error::ResourceCap(format!(
            "{} glue points exceed {PORTAL_CAP}",
            portals.len()
        )));
    }
    let portal_of: HashMap<PointId, u32> = portals
        .iter()
        .enumerate()
        .map(|(i, &g)| (g, i as u32))
        .collect();
    let leaf_portals: Vec<Vec<(u32, u32)>> = leaves
        .iter()
        .map(|leaf| {
            leaf.ids
                .iter()
                .enumerate()
                .filter_map(|(local, g)| portal_of.get(&(*g as usize)).map(|&p| (local as u32, p)))
                .collect()
        })
        .collect();

    let mut metric = GluedMetric {
        protos,
        classes,
        leaves,
        member_start,
        members,
        portals,
        leaf_portals,
        portal_dist: Vec::new(),
    };
    metric.portal_dist = metric.portal_table();

    let mut resolution = f64::INFINITY;
    for (piece, scale) in &spec.pieces {
        if piece.resolution > 0.0 {
            resolution = resolution.min(piece.resolution * scale);
        }
    }
    let resolution = if resolution.is_finite() {
        resolution
    } else {
        0.0
    };

    let metas: Vec<Option<PointMeta>> = (0..n)
        .map(|g| {
            let &(leaf, local) = metric.memberships(g).first()?;
            let proto = metric.leaf_proto(leaf as usize);
            proto.meta(local as usize).map(|m| PointMeta {
                piece: leaf,
                segment: m.segment,
                t: m.t,
            })
        })
        .collect();
    let mut space = FiniteMetricSpace::abstract_points("glued", Metric::Glued(metric), resolution);
    for (g, m) in metas.into_iter().enumerate() {
        if let Some(m) = m {
            space.set_meta(g, m);
        }
    }
    let ids = spec
        .pieces
        .iter()
        .zip(&offsets)
        .map(|((piece, _), &off)| (0..piece.len()).map(|i| new_id[off + i] as usize).collect())
        .collect();
    Ok((space, ids))
}

impl GluedMetric {
    fn portal_table(&self) -> Vec<f64> {
        let p = self.portals.len();
        let mut adj = vec![Vec::new(); p];
        for (li, lp) in self.leaf_portals.iter().enumerate() {
            let (proto, scale) = self.leaf_geometry(li);
            for (a, &(la, pa)) in lp.iter().enumerate() {
                for &(lb, pb) in &lp[a + 1..] {
                    let w = scale * proto.dist(la as usize, lb as usize);
                    if w.is_finite() && pa != pb {
                        adj[pa as usize].push((pb as usize, w));
                        adj[pb as usize].push((pa as usize, w));
                    }
                }
            }
        }
        let g = AdjacencyGraph { adj };
        let mut table = Vec::with_capacity(p * p);
        for s in 0..p {
            table.extend(dijkstra(&g, s));
        }
        table
    }

    fn leaf_geometry(&self, leaf: usize) -> (&FiniteMetricSpace, f64) {
        let c = &self.classes[self.leaves[leaf].class];
        (&self.protos[c.proto], c.scale)
    }

    pub fn leaf_proto(&self, leaf: usize) -> &FiniteMetricSpace {
        self.leaf_geometry(leaf).0
    }

    pub fn len(&self) -> usize {
        self.member_start.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn protos(&self) -> &[Arc<FiniteMetricSpace>] {
        &self.protos
    }

    pub fn classes(&self) -> &[LeafClass] {
        &self.classes
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn portals(&self) -> &[PointId] {
        &self.portals
    }

    /// `(leaf, local id)` pairs representing global point `g`.
    pub fn memberships(&self, g: PointId) -> &[(u32, u32)] {
        &self.members[self.member_start[g] as usize..self.member_start[g + 1] as usize]
    }

    /// Within-leaf distances to the leaf's portals, as `(portal, distance)`.
    fn portal_legs(&self, g: PointId) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.memberships(g).iter().flat_map(move |&(leaf, local)| {
            let (proto, scale) = self.leaf_geometry(leaf as usize);
            self.leaf_portals[leaf as usize]
                .iter()
                .map(move |&(pl, p)| (p as usize, scale * proto.dist(local as usize, pl as usize)))
        })
    }

    /// Quotient distance between global points.
    pub fn distance(&self, a: PointId, b: PointId) -> f64 {
        if a == b {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for &(la, xa) in self.memberships(a) {
            for &(lb, xb) in self.memberships(b) {
                if la == lb {
                    let (proto, scale) = self.leaf_geometry(la as usize);
                    best = best.min(scale * proto.dist(xa as usize, xb as usize));
                }
            }
        }
        let p = self.portals.len();
        let legs_b: Vec<(usize, f64)> = self.portal_legs(b).collect();
        for (pa, da) in self.portal_legs(a) {
            if da >= best {
                continue;
            }
            for &(pb, db) in &legs_b {
                best = best.min(da + self.portal_dist[pa * p + pb] + db);
            }
        }
        best
    }
}
