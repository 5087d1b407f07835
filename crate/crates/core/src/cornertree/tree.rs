use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

pub const MAX_TREE_VERTICES: usize = 6;

/// Position of a child relative to its parent. East/West is later/earlier in
/// time, North/South is larger/smaller in value. Both relations are strict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    NE,
    NW,
    SE,
    SW,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::NE, Direction::NW, Direction::SE, Direction::SW];

    pub fn is_east(self) -> bool {
        matches!(self, Direction::NE | Direction::SE)
    }

    pub fn is_north(self) -> bool {
        matches!(self, Direction::NE | Direction::NW)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::NE => "NE",
            Direction::NW => "NW",
            Direction::SE => "SE",
            Direction::SW => "SW",
        }
    }

    /// Whether a child at `(time, value)` sits in this direction from the parent.
    #[inline]
    pub fn holds<T: PartialOrd, U: PartialOrd>(self, parent: (T, U), child: (T, U)) -> bool {
        let east = child.0 > parent.0;
        let west = child.0 < parent.0;
        let north = child.1 > parent.1;
        let south = child.1 < parent.1;
        match self {
            Direction::NE => east && north,
            Direction::NW => west && north,
            Direction::SE => east && south,
            Direction::SW => west && south,
        }
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NE" => Ok(Direction::NE),
            "NW" => Ok(Direction::NW),
            "SE" => Ok(Direction::SE),
            "SW" => Ok(Direction::SW),
            _ => Err(Error::InvalidTree(format!("unknown edge label {s:?}"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Recursive form used for canonicalization: a vertex and its labelled branches.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    children: Vec<(Direction, Node)>,
}

impl Node {
    fn size(&self) -> usize {
        1 + self.children.iter().map(|(_, c)| c.size()).sum::<usize>()
    }

    fn canonicalize(&mut self) {
        for (_, c) in &mut self.children {
            c.canonicalize();
        }
        self.children
            .sort_by_cached_key(|(d, c)| branch_encoding(*d, c));
    }

    fn write_children(&self, out: &mut String) {
        for (d, c) in &self.children {
            out.push(' ');
            out.push_str(&branch_encoding(*d, c));
        }
    }
}

fn branch_encoding(d: Direction, node: &Node) -> String {
    let mut s = String::from("(");
    s.push_str(d.as_str());
    node.write_children(&mut s);
    s.push(')');
    s
}

/// A rooted, unordered tree whose non-root edges carry a [`Direction`].
///
/// Vertices are numbered in preorder of the canonical form, so vertex 0 is the
/// root and every parent precedes its children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CornerTree {
    parent: Vec<Option<usize>>,
    label: Vec<Option<Direction>>,
    children: Vec<Vec<usize>>,
    encoding: String,
}

impl CornerTree {
    /// The one-vertex tree.
    pub fn single() -> Self {
        Self::from_node(Node { children: vec![] })
    }

    /// Builds a tree from `(parent, direction)` pairs for vertices `1..`; vertex 0 is the root.
    pub fn from_edges(edges: &[(usize, Direction)]) -> Result<Self> {
        let v = edges.len() + 1;
        if v > MAX_TREE_VERTICES {
            return Err(Error::InvalidTree(format!(
                "{v} vertices exceeds {MAX_TREE_VERTICES}"
            )));
        }
        let mut kids: Vec<Vec<(usize, Direction)>> = vec![vec![]; v];
        for (i, &(p, d)) in edges.iter().enumerate() {
            let child = i + 1;
            if p >= child {
                return Err(Error::InvalidTree(format!(
                    "parent {p} of vertex {child} must precede it"
                )));
            }
            kids[p].push((child, d));
        }
        fn build(u: usize, kids: &[Vec<(usize, Direction)>]) -> Node {
            Node {
                children: kids[u].iter().map(|&(c, d)| (d, build(c, kids))).collect(),
            }
        }
        Ok(Self::from_node(build(0, &kids)))
    }

    fn from_node(mut node: Node) -> Self {
        node.canonicalize();
        let mut encoding = String::from("(root");
        node.write_children(&mut encoding);
        encoding.push(')');

        let mut tree = CornerTree {
            parent: vec![],
            label: vec![],
            children: vec![],
            encoding,
        };
        fn walk(node: &Node, parent: Option<usize>, label: Option<Direction>, t: &mut CornerTree) {
            let id = t.parent.len();
            t.parent.push(parent);
            t.label.push(label);
            t.children.push(vec![]);
            if let Some(p) = parent {
                t.children[p].push(id);
            }
            for (d, c) in &node.children {
                walk(c, Some(id), Some(*d), t);
            }
        }
        walk(&node, None, None, &mut tree);
        tree
    }

    fn to_node(&self) -> Node {
        fn build(t: &CornerTree, u: usize) -> Node {
            Node {
                children: t.children[u]
                    .iter()
                    .map(|&c| (t.label[c].expect("non-root"), build(t, c)))
                    .collect(),
            }
        }
        build(self, 0)
    }

    pub fn vertices(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        self.parent[u]
    }

    pub fn label(&self, u: usize) -> Option<Direction> {
        self.label[u]
    }

    pub fn children(&self, u: usize) -> &[usize] {
        &self.children[u]
    }

    /// Non-root edges as `(parent, child, direction)`, in preorder of the child.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Direction)> + '_ {
        (1..self.vertices()).map(move |c| (self.parent[c].unwrap(), c, self.label[c].unwrap()))
    }

    /// Canonical text encoding; isomorphic trees share it.
    pub fn encoding(&self) -> &str {
        &self.encoding
    }

    /// The tree with every edge mirrored in time (E <-> W).
    pub fn mirrored_in_time(&self) -> CornerTree {
        self.map_labels(|d| match d {
            Direction::NE => Direction::NW,
            Direction::NW => Direction::NE,
            Direction::SE => Direction::SW,
            Direction::SW => Direction::SE,
        })
    }

    /// The tree with every edge mirrored in value (N <-> S).
    pub fn mirrored_in_value(&self) -> CornerTree {
        self.map_labels(|d| match d {
            Direction::NE => Direction::SE,
            Direction::SE => Direction::NE,
            Direction::NW => Direction::SW,
            Direction::SW => Direction::NW,
        })
    }

    fn map_labels(&self, f: impl Fn(Direction) -> Direction + Copy) -> CornerTree {
        fn go(n: &Node, f: impl Fn(Direction) -> Direction + Copy) -> Node {
            Node {
                children: n.children.iter().map(|(d, c)| (f(*d), go(c, f))).collect(),
            }
        }
        Self::from_node(go(&self.to_node(), f))
    }
}

impl fmt::Display for CornerTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding)
    }
}

impl FromStr for CornerTree {
    type Err = Error;

    /// Parses the nested-parentheses form, e.g. `(root (NE) (NE (SW)))`.
    fn from_str(s: &str) -> Result<Self> {
        let spaced = s.replace('(', " ( ").replace(')', " ) ");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();
        let mut pos = 0;

        fn expect(tokens: &[&str], pos: &mut usize, want: &str) -> Result<()> {
            match tokens.get(*pos) {
                Some(t) if *t == want => {
                    *pos += 1;
                    Ok(())
                }
                other => Err(Error::InvalidTree(format!(
                    "expected {want:?}, found {other:?}"
                ))),
            }
        }
        fn children(tokens: &[&str], pos: &mut usize) -> Result<Vec<(Direction, Node)>> {
            let mut out = vec![];
            while tokens.get(*pos) == Some(&"(") {
                *pos += 1;
                let label: Direction = tokens
                    .get(*pos)
                    .ok_or_else(|| Error::InvalidTree("unexpected end".into()))?
                    .parse()?;
                *pos += 1;
                let kids = children(tokens, pos)?;
                expect(tokens, pos, ")")?;
                out.push((label, Node { children: kids }));
            }
            Ok(out)
        }

        expect(&tokens, &mut pos, "(")?;
        expect(&tokens, &mut pos, "root")?;
        let kids = children(&tokens, &mut pos)?;
        expect(&tokens, &mut pos, ")")?;
        if pos != tokens.len() {
            return Err(Error::InvalidTree(format!("trailing input in {s:?}")));
        }
        let node = Node { children: kids };
        if node.size() > MAX_TREE_VERTICES {
            return Err(Error::InvalidTree(format!(
                "{} vertices exceeds {MAX_TREE_VERTICES}",
                node.size()
            )));
        }
        Ok(Self::from_node(node))
    }
}

/// Every corner tree with `v` vertices up to isomorphism, sorted by canonical encoding.
pub fn enumerate_corner_trees(v: usize) -> Result<Arc<Vec<CornerTree>>> {
    if v == 0 || v > MAX_TREE_VERTICES {
        return Err(Error::OrderOutOfRange {
            order: v,
            min: 1,
            max: MAX_TREE_VERTICES,
        });
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<CornerTree>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&v) {
        return Ok(hit.clone());
    }
    let mut memo: HashMap<usize, Vec<Node>> = HashMap::new();
    let mut trees: Vec<CornerTree> = shapes(v, &mut memo)
        .into_iter()
        .map(CornerTree::from_node)
        .collect();
    trees.sort_by(|a, b| a.encoding.cmp(&b.encoding));
    trees.dedup_by(|a, b| a.encoding == b.encoding);
    let trees = Arc::new(trees);
    cache.lock().unwrap().insert(v, trees.clone());
    Ok(trees)
}

/// All canonical labelled trees of size `v`.
fn shapes(v: usize, memo: &mut HashMap<usize, Vec<Node>>) -> Vec<Node> {
    if let Some(hit) = memo.get(&v) {
        return hit.clone();
    }
    // every possible branch, keyed by encoding, grouped by size
    let mut branches: Vec<(String, usize, Direction, Node)> = vec![];
    for s in 1..v {
        for sub in shapes(s, memo) {
            for d in Direction::ALL {
                branches.push((branch_encoding(d, &sub), s, d, sub.clone()));
            }
        }
    }
    branches.sort_by(|a, b| a.0.cmp(&b.0));

    // multisets of branches whose sizes add up to v - 1, as non-decreasing index sequences
    fn forests(
        branches: &[(String, usize, Direction, Node)],
        from: usize,
        remaining: usize,
        acc: &mut Vec<usize>,
        out: &mut Vec<Node>,
    ) {
        if remaining == 0 {
            out.push(Node {
                children: acc
                    .iter()
                    .map(|&i| (branches[i].2, branches[i].3.clone()))
                    .collect(),
            });
            return;
        }
        for i in from..branches.len() {
            if branches[i].1 <= remaining {
                acc.push(i);
                forests(branches, i, remaining - branches[i].1, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = vec![];
    forests(&branches, 0, v - 1, &mut vec![], &mut out);
    memo.insert(v, out.clone());
    out
}
