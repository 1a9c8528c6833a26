//! Interaction and knowledge-graph storage, file ingestion, splitting,
//! and synthetic dataset generation.
//!
//! Two graphs drive the model:
//! * `G1`, a bipartite user-item interaction graph, and
//! * `G2`, a knowledge graph of (head entity, relation, tail entity)
//!   triples with a partial mapping from items to entities.
//!
//! File formats (all TSV-style, whitespace-separated integer ids,
//! `#`-prefixed comment lines allowed):
//! * interactions: `user item` per line
//! * knowledge graph: `head relation tail` per line
//! * item-entity map: `item entity` per line
//!
//! External ids are densified to `[0, n)` in order of first appearance;
//! the original ids are retained so files round-trip exactly.

use std::collections::HashMap;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Which side of the bipartite graph a node id refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    User,
    Item,
}

/// Bipartite user-item interaction graph with per-side adjacency.
///
/// Edges keep their insertion order (which makes saves and digests
/// deterministic); adjacency lists are sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    num_users: usize,
    num_items: usize,
    edges: Vec<(u32, u32)>,
    user_adj: Vec<Vec<u32>>,
    item_adj: Vec<Vec<u32>>,
    user_ids: Vec<u64>,
    item_ids: Vec<u64>,
}

impl BipartiteGraph {
    /// Build a graph from dense-id edges. Duplicate edges are dropped with
    /// a warning; out-of-range ids are errors.
    pub fn from_edges(
        num_users: usize,
        num_items: usize,
        edges: Vec<(u32, u32)>,
    ) -> Result<Self> {
        Self::with_external_ids(
            num_users,
            num_items,
            edges,
            (0..num_users as u64).collect(),
            (0..num_items as u64).collect(),
        )
    }

    fn with_external_ids(
        num_users: usize,
        num_items: usize,
        edges: Vec<(u32, u32)>,
        user_ids: Vec<u64>,
        item_ids: Vec<u64>,
    ) -> Result<Self> {
        let mut user_adj = vec![Vec::new(); num_users];
        let mut item_adj = vec![Vec::new(); num_items];
        let mut kept = Vec::with_capacity(edges.len());
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        let mut dupes = 0usize;
        for (u, i) in edges {
            if u as usize >= num_users {
                return Err(Error::Data(format!(
                    "user id {u} out of range (num_users = {num_users})"
                )));
            }
            if i as usize >= num_items {
                return Err(Error::Data(format!(
                    "item id {i} out of range (num_items = {num_items})"
                )));
            }
            if !seen.insert((u, i)) {
                dupes += 1;
                continue;
            }
            user_adj[u as usize].push(i);
            item_adj[i as usize].push(u);
            kept.push((u, i));
        }
        if dupes > 0 {
            log::warn!("dropped {dupes} duplicate interaction(s)");
        }
        for adj in user_adj.iter_mut().chain(item_adj.iter_mut()) {
            adj.sort_unstable();
        }
        Ok(BipartiteGraph {
            num_users,
            num_items,
            edges: kept,
            user_adj,
            item_adj,
            user_ids,
            item_ids,
        })
    }

    /// Number of user nodes.
    pub fn num_users(&self) -> usize {
        self.num_users
    }

    /// Number of item nodes.
    pub fn num_items(&self) -> usize {
        self.num_items
    }

    /// Number of (deduplicated) edges.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Sorted neighbor list of a node.
    pub fn neighbors(&self, node: u32, side: Side) -> Result<&[u32]> {
        match side {
            Side::User => self
                .user_adj
                .get(node as usize)
                .map(|v| v.as_slice())
                .ok_or(Error::Data(format!("user id {node} out of range"))),
            Side::Item => self
                .item_adj
                .get(node as usize)
                .map(|v| v.as_slice())
                .ok_or(Error::Data(format!("item id {node} out of range"))),
        }
    }

    /// Degree of a node.
    pub fn degree(&self, node: u32, side: Side) -> Result<usize> {
        Ok(self.neighbors(node, side)?.len())
    }

    /// Whether the interaction (u, i) is present. O(log deg(u)).
    pub fn has_edge(&self, u: u32, i: u32) -> bool {
        self.user_adj
            .get(u as usize)
            .map(|adj| adj.binary_search(&i).is_ok())
            .unwrap_or(false)
    }

    /// Original (pre-densification) id of a user.
    pub fn external_user_id(&self, u: u32) -> u64 {
        self.user_ids[u as usize]
    }

    /// Original (pre-densification) id of an item.
    pub fn external_item_id(&self, i: u32) -> u64 {
        self.item_ids[i as usize]
    }

    /// Order-sensitive content digest (FNV-1a over counts and edges);
    /// used to assert that a graph was not mutated.
    pub fn digest(&self) -> u64 {
        let mut h = fnv1a_init();
        h = fnv1a_u64(h, self.num_users as u64);
        h = fnv1a_u64(h, self.num_items as u64);
        for &(u, i) in &self.edges {
            h = fnv1a_u64(h, u as u64);
            h = fnv1a_u64(h, i as u64);
        }
        h
    }

    /// A graph over the same id spaces with a subset of edges.
    fn subset(&self, edges: Vec<(u32, u32)>) -> Result<Self> {
        Self::with_external_ids(
            self.num_users,
            self.num_items,
            edges,
            self.user_ids.clone(),
            self.item_ids.clone(),
        )
    }
}

/// Knowledge graph over entities with typed relations and an optional
/// item-to-entity mapping. Adjacency is undirected: a triple (h, r, t)
/// makes `t` a neighbor of `h` and vice versa, both labeled `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeGraph {
    num_entities: usize,
    num_relations: usize,
    triples: Vec<(u32, u32, u32)>,
    adj: Vec<Vec<(u32, u32)>>,
    item_to_entity: Vec<Option<u32>>,
    entity_ids: Vec<u64>,
    relation_ids: Vec<u64>,
}

impl KnowledgeGraph {
    /// Build from dense-id triples, validating ranges and deduplicating.
    pub fn new(
        num_entities: usize,
        num_relations: usize,
        triples: Vec<(u32, u32, u32)>,
    ) -> Result<Self> {
        Self::with_external_ids(
            num_entities,
            num_relations,
            triples,
            (0..num_entities as u64).collect(),
            (0..num_relations as u64).collect(),
        )
    }

    fn with_external_ids(
        num_entities: usize,
        num_relations: usize,
        triples: Vec<(u32, u32, u32)>,
        entity_ids: Vec<u64>,
        relation_ids: Vec<u64>,
    ) -> Result<Self> {
        let mut adj = vec![Vec::new(); num_entities];
        let mut kept = Vec::with_capacity(triples.len());
        let mut seen = std::collections::HashSet::with_capacity(triples.len());
        let mut dupes = 0usize;
        for (h, r, t) in triples {
            if h as usize >= num_entities || t as usize >= num_entities {
                return Err(Error::Data(format!(
                    "entity id out of range in triple ({h}, {r}, {t}): num_entities = {num_entities}"
                )));
            }
            if r as usize >= num_relations {
                return Err(Error::Data(format!(
                    "relation id {r} out of range (num_relations = {num_relations})"
                )));
            }
            if !seen.insert((h, r, t)) {
                dupes += 1;
                continue;
            }
            adj[h as usize].push((t, r));
            adj[t as usize].push((h, r));
            kept.push((h, r, t));
        }
        if dupes > 0 {
            log::warn!("dropped {dupes} duplicate triple(s)");
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        Ok(KnowledgeGraph {
            num_entities,
            num_relations,
            triples: kept,
            adj,
            item_to_entity: Vec::new(),
            entity_ids,
            relation_ids,
        })
    }

    /// Attach the item-to-entity mapping (indexed by dense item id).
    pub fn set_item_map(&mut self, map: Vec<Option<u32>>) -> Result<()> {
        for e in map.iter().flatten() {
            if *e as usize >= self.num_entities {
                return Err(Error::Data(format!(
                    "item map references entity {e} >= num_entities {}",
                    self.num_entities
                )));
            }
        }
        self.item_to_entity = map;
        Ok(())
    }

    /// Number of entities.
    pub fn num_entities(&self) -> usize {
        self.num_entities
    }

    /// Number of relation types.
    pub fn num_relations(&self) -> usize {
        self.num_relations
    }

    /// Triples in insertion order.
    pub fn triples(&self) -> &[(u32, u32, u32)] {
        &self.triples
    }

    /// Undirected neighbors of an entity as (entity, relation) pairs,
    /// sorted.
    pub fn entity_neighbors(&self, e: u32) -> Result<&[(u32, u32)]> {
        self.adj
            .get(e as usize)
            .map(|v| v.as_slice())
            .ok_or(Error::Data(format!("entity id {e} out of range")))
    }

    /// Entity an item is anchored to, if any.
    pub fn item_entity(&self, item: u32) -> Option<u32> {
        self.item_to_entity.get(item as usize).copied().flatten()
    }

    /// KG neighborhood of an item: neighbors of its anchor entity
    /// (empty if the item has no entity).
    pub fn item_neighbors(&self, item: u32) -> &[(u32, u32)] {
        match self.item_entity(item) {
            Some(e) => self.adj[e as usize].as_slice(),
            None => &[],
        }
    }

    /// Order-sensitive content digest, mirroring
    /// [`BipartiteGraph::digest`].
    pub fn digest(&self) -> u64 {
        let mut h = fnv1a_init();
        h = fnv1a_u64(h, self.num_entities as u64);
        h = fnv1a_u64(h, self.num_relations as u64);
        for &(a, r, b) in &self.triples {
            h = fnv1a_u64(h, a as u64);
            h = fnv1a_u64(h, r as u64);
            h = fnv1a_u64(h, b as u64);
        }
        for m in &self.item_to_entity {
            h = fnv1a_u64(h, m.map(|e| e as u64 + 1).unwrap_or(0));
        }
        h
    }

    /// Original id of an entity.
    pub fn external_entity_id(&self, e: u32) -> u64 {
        self.entity_ids[e as usize]
    }

    /// Original id of a relation.
    pub fn external_relation_id(&self, r: u32) -> u64 {
        self.relation_ids[r as usize]
    }
}

/// Train/validation/test partition of an interaction graph. All three
/// graphs share the source graph's id spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: BipartiteGraph,
    pub valid: BipartiteGraph,
    pub test: BipartiteGraph,
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a_init() -> u64 {
    FNV_OFFSET
}

fn fnv1a_u64(mut h: u64, v: u64) -> u64 {
    for byte in v.to_le_bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Iterate data lines of a TSV-ish file: skips blanks and '#' comments,
/// yields (1-based line number, whitespace-split fields).
fn parse_id_lines(path: &Path, fields: usize) -> Result<Vec<(usize, Vec<u64>)>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    let reader = std::io::BufReader::new(file);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let content = line.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = content.split_whitespace().collect();
        if parts.len() != fields {
            return Err(Error::Data(format!(
                "{}:{lineno}: expected {fields} fields, found {}",
                path.display(),
                parts.len()
            )));
        }
        let mut ids = Vec::with_capacity(fields);
        for p in &parts {
            let v: u64 = p.parse().map_err(|_| {
                Error::Data(format!(
                    "{}:{lineno}: '{p}' is not a non-negative integer",
                    path.display()
                ))
            })?;
            ids.push(v);
        }
        rows.push((lineno, ids));
    }
    Ok(rows)
}

/// Assign a dense id to an external id on first appearance.
fn densify(map: &mut HashMap<u64, u32>, order: &mut Vec<u64>, ext: u64) -> u32 {
    match map.get(&ext) {
        Some(&d) => d,
        None => {
            let d = order.len() as u32;
            map.insert(ext, d);
            order.push(ext);
            d
        }
    }
}

/// Load a user-item interaction file (see module docs for the format).
pub fn load_interactions<P: AsRef<Path>>(path: P) -> Result<BipartiteGraph> {
    let rows = parse_id_lines(path.as_ref(), 2)?;
    let mut umap = HashMap::new();
    let mut imap = HashMap::new();
    let mut user_ids = Vec::new();
    let mut item_ids = Vec::new();
    let mut edges = Vec::with_capacity(rows.len());
    for (_, ids) in rows {
        let u = densify(&mut umap, &mut user_ids, ids[0]);
        let i = densify(&mut imap, &mut item_ids, ids[1]);
        edges.push((u, i));
    }
    BipartiteGraph::with_external_ids(user_ids.len(), item_ids.len(), edges, user_ids, item_ids)
}

/// Save interactions using the original external ids, one edge per line.
pub fn save_interactions<P: AsRef<Path>>(g: &BipartiteGraph, path: P) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for &(u, i) in g.edges() {
        writeln!(w, "{}\t{}", g.external_user_id(u), g.external_item_id(i))?;
    }
    Ok(())
}

/// Load a knowledge-graph triple file (head, relation, tail per line).
pub fn load_kg<P: AsRef<Path>>(path: P) -> Result<KnowledgeGraph> {
    let rows = parse_id_lines(path.as_ref(), 3)?;
    let mut emap = HashMap::new();
    let mut rmap = HashMap::new();
    let mut entity_ids = Vec::new();
    let mut relation_ids = Vec::new();
    let mut triples = Vec::with_capacity(rows.len());
    for (_, ids) in rows {
        let h = densify(&mut emap, &mut entity_ids, ids[0]);
        let r = densify(&mut rmap, &mut relation_ids, ids[1]);
        let t = densify(&mut emap, &mut entity_ids, ids[2]);
        triples.push((h, r, t));
    }
    KnowledgeGraph::with_external_ids(
        entity_ids.len(),
        relation_ids.len(),
        triples,
        entity_ids,
        relation_ids,
    )
}

/// Save a knowledge graph using original external ids.
pub fn save_kg<P: AsRef<Path>>(kg: &KnowledgeGraph, path: P) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for &(h, r, t) in kg.triples() {
        writeln!(
            w,
            "{}\t{}\t{}",
            kg.external_entity_id(h),
            kg.external_relation_id(r),
            kg.external_entity_id(t)
        )?;
    }
    Ok(())
}

/// Load an item-to-entity map file. Ids in the file are external ids of
/// the interaction graph's items and the knowledge graph's entities; the
/// result is indexed by dense item id.
pub fn load_item_map<P: AsRef<Path>>(
    path: P,
    g: &BipartiteGraph,
    kg: &KnowledgeGraph,
) -> Result<Vec<Option<u32>>> {
    let rows = parse_id_lines(path.as_ref(), 2)?;
    let item_lookup: HashMap<u64, u32> = (0..g.num_items())
        .map(|i| (g.external_item_id(i as u32), i as u32))
        .collect();
    let entity_lookup: HashMap<u64, u32> = (0..kg.num_entities())
        .map(|e| (kg.external_entity_id(e as u32), e as u32))
        .collect();
    let mut map = vec![None; g.num_items()];
    for (lineno, ids) in rows {
        let Some(&item) = item_lookup.get(&ids[0]) else {
            // Items never seen in the interaction file cannot be scored;
            // their KG anchors are irrelevant.
            log::warn!("item map line {lineno}: unknown item id {}, skipped", ids[0]);
            continue;
        };
        let Some(&entity) = entity_lookup.get(&ids[1]) else {
            return Err(Error::Data(format!(
                "item map line {lineno}: unknown entity id {}",
                ids[1]
            )));
        };
        map[item as usize] = Some(entity);
    }
    Ok(map)
}

/// Save an item-to-entity map using external ids.
pub fn save_item_map<P: AsRef<Path>>(
    map: &[Option<u32>],
    g: &BipartiteGraph,
    kg: &KnowledgeGraph,
    path: P,
) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for (i, e) in map.iter().enumerate() {
        if let Some(e) = e {
            writeln!(
                w,
                "{}\t{}",
                g.external_item_id(i as u32),
                kg.external_entity_id(*e)
            )?;
        }
    }
    Ok(())
}

/// Split interactions into train/validation/test.
///
/// Per user, a seeded shuffle sends `max(1, floor(train_frac * deg))`
/// edges to the train pool and the rest to test; degree-1 users keep
/// their single edge in train. The validation set is then
/// `floor(valid_frac_of_train * |train pool|)` edges drawn globally from
/// the train pool, never taking a user's last remaining train edge (every
/// interacting user keeps at least one train positive).
pub fn split(
    g: &BipartiteGraph,
    train_frac: f64,
    valid_frac_of_train: f64,
    seed: u64,
) -> Result<DatasetSplit> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must be in (0, 1), got {train_frac}"
        )));
    }
    if !(valid_frac_of_train >= 0.0 && valid_frac_of_train < 1.0) {
        return Err(Error::Config(format!(
            "validation fraction must be in [0, 1), got {valid_frac_of_train}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_pool: Vec<(u32, u32)> = Vec::new();
    let mut test_edges: Vec<(u32, u32)> = Vec::new();
    for u in 0..g.num_users() as u32 {
        let mut items = g.neighbors(u, Side::User)?.to_vec();
        if items.is_empty() {
            continue;
        }
        items.shuffle(&mut rng);
        let deg = items.len();
        let n_train = ((train_frac * deg as f64).floor() as usize).max(1);
        for (pos, &i) in items.iter().enumerate() {
            if pos < n_train {
                train_pool.push((u, i));
            } else {
                test_edges.push((u, i));
            }
        }
    }
    // Global validation carve from the train pool.
    let n_valid = (valid_frac_of_train * train_pool.len() as f64).floor() as usize;
    let mut order: Vec<usize> = (0..train_pool.len()).collect();
    order.shuffle(&mut rng);
    let mut user_train_count = vec![0usize; g.num_users()];
    for &(u, _) in &train_pool {
        user_train_count[u as usize] += 1;
    }
    let mut to_valid = vec![false; train_pool.len()];
    let mut taken = 0;
    for &idx in &order {
        if taken == n_valid {
            break;
        }
        let (u, _) = train_pool[idx];
        if user_train_count[u as usize] >= 2 {
            user_train_count[u as usize] -= 1;
            to_valid[idx] = true;
            taken += 1;
        }
    }
    let mut train_edges = Vec::with_capacity(train_pool.len() - taken);
    let mut valid_edges = Vec::with_capacity(taken);
    for (idx, &e) in train_pool.iter().enumerate() {
        if to_valid[idx] {
            valid_edges.push(e);
        } else {
            train_edges.push(e);
        }
    }
    Ok(DatasetSplit {
        train: g.subset(train_edges)?,
        valid: g.subset(valid_edges)?,
        test: g.subset(test_edges)?,
    })
}

/// Number of latent preference groups in synthetic data.
const SYN_GROUPS: usize = 4;
/// Probability that a synthetic interaction stays within the user's group.
const SYN_IN_GROUP: f64 = 0.8;
/// Per-user interaction count range for synthetic data.
const SYN_DEG_MIN: usize = 5;
const SYN_DEG_MAX: usize = 15;

/// Generate a synthetic dataset: a power-law bipartite graph plus a
/// forest-shaped knowledge graph rooted at items.
///
/// Item `i` carries sampling weight `(i + 1)^(-power_exponent)`, so item
/// popularity follows a discrete power law (item 0 most popular). Users
/// and items are also assigned to a small number of latent groups
/// (round-robin by id), and each user draws most interactions from its
/// own group's items; this plants a collaborative signal that a trained
/// model can exploit while leaving expected item popularity proportional
/// to the power-law weights.
///
/// For the knowledge graph, entities `0..min(n_items, n_entities)` anchor
/// the corresponding items; every further entity attaches to one
/// uniformly chosen earlier entity with a uniform relation label, forming
/// trees rooted at item anchors.
pub fn gen_synthetic(
    n_users: usize,
    n_items: usize,
    n_entities: usize,
    n_relations: usize,
    power_exponent: f64,
    seed: u64,
) -> Result<(BipartiteGraph, KnowledgeGraph)> {
    if n_users == 0 || n_items == 0 || n_entities == 0 || n_relations == 0 {
        return Err(Error::Config(
            "synthetic sizes must all be positive".to_string(),
        ));
    }
    if !power_exponent.is_finite() || power_exponent < 0.0 {
        return Err(Error::Config(format!(
            "power exponent must be finite and >= 0, got {power_exponent}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = SYN_GROUPS.min(n_items);
    let weights: Vec<f64> = (0..n_items)
        .map(|i| ((i + 1) as f64).powf(-power_exponent))
        .collect();

    // Cumulative weights globally and per group (group of item i = i % groups).
    let global_cum = cumulative(&weights);
    let group_items: Vec<Vec<u32>> = (0..groups)
        .map(|gid| {
            (0..n_items as u32)
                .filter(|i| (*i as usize) % groups == gid)
                .collect()
        })
        .collect();
    let group_cum: Vec<Vec<f64>> = group_items
        .iter()
        .map(|items| cumulative(&items.iter().map(|&i| weights[i as usize]).collect::<Vec<_>>()))
        .collect();

    let mut edges = Vec::new();
    for u in 0..n_users {
        let gid = u % groups;
        let deg = rng.random_range(SYN_DEG_MIN..=SYN_DEG_MAX).min(n_items);
        let mut chosen = std::collections::BTreeSet::new();
        let mut attempts = 0;
        while chosen.len() < deg {
            attempts += 1;
            let item = if attempts > 50 * deg {
                // Heavy skew can make rejection slow near saturation; fall
                // back to the most popular not-yet-chosen item.
                (0..n_items as u32).find(|i| !chosen.contains(i)).unwrap()
            } else if rng.random::<f64>() < SYN_IN_GROUP && group_items[gid].len() >= deg {
                let k = sample_cumulative(&group_cum[gid], &mut rng);
                group_items[gid][k]
            } else {
                sample_cumulative(&global_cum, &mut rng) as u32
            };
            chosen.insert(item);
        }
        for i in chosen {
            edges.push((u as u32, i));
        }
    }
    let g1 = BipartiteGraph::from_edges(n_users, n_items, edges)?;

    // Knowledge graph: identity anchors plus a random forest above them.
    let anchored = n_items.min(n_entities);
    let mut triples = Vec::new();
    for e in anchored..n_entities {
        let parent = rng.random_range(0..e) as u32;
        let rel = rng.random_range(0..n_relations) as u32;
        triples.push((parent, rel, e as u32));
    }
    let mut g2 = KnowledgeGraph::new(n_entities, n_relations, triples)?;
    let map: Vec<Option<u32>> = (0..n_items)
        .map(|i| if i < anchored { Some(i as u32) } else { None })
        .collect();
    g2.set_item_map(map)?;
    Ok((g1, g2))
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(weights.len());
    let mut s = 0.0;
    for w in weights {
        s += w;
        cum.push(s);
    }
    cum
}

/// Inverse-CDF sampling over a cumulative weight vector.
fn sample_cumulative(cum: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total = *cum.last().unwrap();
    let r = rng.random::<f64>() * total;
    match cum.binary_search_by(|w| w.partial_cmp(&r).unwrap()) {
        Ok(k) => (k + 1).min(cum.len() - 1),
        Err(k) => k.min(cum.len() - 1),
    }
}
