//! Finite posets, intervals, convex hulls and order-embeddings.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// A finite poset with a validated order relation.
///
/// Elements are addressed by index; identifiers are kept for I/O.
#[derive(Clone, Debug)]
pub struct Poset {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<bool>,
    covers: Vec<(usize, usize)>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    linext: Vec<usize>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.leq == other.leq
    }
}

impl Eq for Poset {}

impl Poset {
    /// Reflexive-transitive closure of `pairs`.
    pub fn from_relations<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Poset> {
        let elements: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::DuplicateElement(e.clone()));
            }
        }
        let n = elements.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in pairs {
            let ia = *index
                .get(a.as_ref())
                .ok_or_else(|| Error::UnknownElement(a.as_ref().to_string()))?;
            let ib = *index
                .get(b.as_ref())
                .ok_or_else(|| Error::UnknownElement(b.as_ref().to_string()))?;
            leq[ia * n + ib] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if !leq[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(Error::Cycle(elements[i].clone(), elements[j].clone()));
                }
            }
        }
        Ok(Poset::from_leq(elements, index, leq))
    }

    fn from_leq(elements: Vec<String>, index: HashMap<String, usize>, leq: Vec<bool>) -> Poset {
        let n = elements.len();
        let lt = |a: usize, b: usize| a != b && leq[a * n + b];
        let mut covers = Vec::new();
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                    covers.push((a, b));
                    up[a].push(b);
                    down[b].push(a);
                }
            }
        }
        // Kahn's algorithm, smallest index first, for a deterministic extension.
        let mut indeg: Vec<usize> = down.iter().map(|d| d.len()).collect();
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut linext = Vec::with_capacity(n);
        while let Some(&x) = ready.iter().next() {
            ready.remove(&x);
            linext.push(x);
            for &y in &up[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    ready.insert(y);
                }
            }
        }
        Poset {
            elements,
            index,
            leq,
            covers,
            up,
            down,
            linext,
        }
    }

    /// The n x m grid with product order; elements are named "i,j" (1-based).
    pub fn grid(n: usize, m: usize) -> Poset {
        let mut elements = Vec::new();
        let mut pairs = Vec::new();
        for i in 1..=n {
            for j in 1..=m {
                elements.push(format!("{i},{j}"));
                if i < n {
                    pairs.push((format!("{i},{j}"), format!("{},{j}", i + 1)));
                }
                if j < m {
                    pairs.push((format!("{i},{j}"), format!("{i},{}", j + 1)));
                }
            }
        }
        Poset::from_relations(&elements, &pairs).expect("grid is a poset")
    }

    /// The grid `{(i,j) : i,j >= 1, i + j <= n + m}`: an n x m grid with
    /// staircases added above and to the left.
    pub fn staircase_grid(n: usize, m: usize) -> Poset {
        let s = n + m;
        let mut elements = Vec::new();
        let mut pairs = Vec::new();
        for i in 1..s {
            for j in 1..s {
                if i + j > s {
                    continue;
                }
                elements.push(format!("{i},{j}"));
                if i + 1 + j <= s {
                    pairs.push((format!("{i},{j}"), format!("{},{j}", i + 1)));
                }
                if i + j < s {
                    pairs.push((format!("{i},{j}"), format!("{i},{}", j + 1)));
                }
            }
        }
        Poset::from_relations(&elements, &pairs).expect("staircase grid is a poset")
    }

    /// A chain 1 < 2 < ... < n.
    pub fn chain(n: usize) -> Poset {
        let elements: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let pairs: Vec<(String, String)> = (1..n)
            .map(|i| (i.to_string(), (i + 1).to_string()))
            .collect();
        Poset::from_relations(&elements, &pairs).expect("chain is a poset")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn id(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.len() + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Hasse diagram, sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn is_cover(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(&b)
    }

    pub fn upper_covers(&self, a: usize) -> &[usize] {
        &self.up[a]
    }

    pub fn lower_covers(&self, a: usize) -> &[usize] {
        &self.down[a]
    }

    /// A fixed linear extension (smallest index first among ready elements).
    pub fn linear_extension(&self) -> &[usize] {
        &self.linext
    }

    /// All pairs a <= b, ordered by (a, b).
    pub fn relations(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|a| (0..n).filter(move |&b| self.leq(a, b)).map(move |b| (a, b)))
            .collect()
    }

    pub fn opposite(&self) -> Poset {
        let n = self.len();
        let leq = (0..n * n).map(|k| self.leq[(k % n) * n + k / n]).collect();
        Poset::from_leq(self.elements.clone(), self.index.clone(), leq)
    }

    /// Subposet induced on `subset` (in the given order).
    pub fn induced(&self, subset: &[usize]) -> Poset {
        let elements: Vec<String> = subset.iter().map(|&i| self.elements[i].clone()).collect();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let k = subset.len();
        let leq = (0..k * k)
            .map(|t| self.leq(subset[t / k], subset[t % k]))
            .collect();
        Poset::from_leq(elements, index, leq)
    }

    pub fn up_set(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.leq(a, c)).collect()
    }

    pub fn down_set(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.leq(c, a)).collect()
    }

    /// [a, b]
    pub fn segment(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&c| self.leq(a, c) && self.leq(c, b))
            .collect()
    }

    /// [a, b[ = {c | a <= c, not b <= c}
    pub fn hook_set(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&c| self.leq(a, c) && !self.leq(b, c))
            .collect()
    }

    /// ]a, b] = {c | c <= b, not c <= a}
    pub fn cohook_set(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&c| self.leq(c, b) && !self.leq(c, a))
            .collect()
    }

    pub fn convex_hull(&self, s: &[usize]) -> Result<Vec<usize>> {
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok((0..self.len())
            .filter(|&x| s.iter().any(|&y| self.leq(y, x)) && s.iter().any(|&z| self.leq(x, z)))
            .collect())
    }

    pub fn is_convex(&self, s: &[usize]) -> bool {
        s.is_empty() || self.convex_hull(s).is_ok_and(|h| h.len() == dedup_len(s))
    }

    /// Connectivity of the comparability graph restricted to `s`.
    pub fn is_connected_subset(&self, s: &[usize]) -> bool {
        if s.is_empty() {
            return false;
        }
        let mut seen = vec![false; s.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..s.len() {
                if !seen[j] && self.comparable(s[i], s[j]) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_interval(&self, s: &[usize]) -> bool {
        self.is_convex(s) && self.is_connected_subset(s)
    }

    pub fn is_connected(&self) -> bool {
        let all: Vec<usize> = (0..self.len()).collect();
        self.is_connected_subset(&all)
    }

    /// Number of elements in a longest chain.
    pub fn height(&self) -> usize {
        let mut h = vec![0usize; self.len()];
        for &x in &self.linext {
            h[x] = 1 + self.down[x].iter().map(|&y| h[y]).max().unwrap_or(0);
        }
        h.into_iter().max().unwrap_or(0)
    }

    /// All intervals (convex connected subsets), sorted by size then members.
    /// Guarded to `len() <= 20`.
    pub fn intervals(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.len();
        if n > 20 {
            return Err(Error::TooLarge(n));
        }
        let mask = |s: &[usize]| s.iter().fold(0u32, |m, &i| m | (1 << i));
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        let mut frontier: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for s in &frontier {
            seen.insert(mask(s));
        }
        let mut out = frontier.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                for x in 0..n {
                    if s.contains(&x) || !s.iter().any(|&y| self.comparable(x, y)) {
                        continue;
                    }
                    let mut t = s.clone();
                    t.push(x);
                    let h = self.convex_hull(&t).expect("nonempty");
                    if seen.insert(mask(&h)) {
                        next.push(h);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(out)
    }

    /// Connected subsets whose induced subposet has no chain with 3 elements.
    /// Guarded to `len() <= 20`.
    pub fn height_two_subsets(&self) -> Result<Vec<Vec<usize>>> {
        let n = self.len();
        if n > 20 {
            return Err(Error::TooLarge(n));
        }
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        let mut frontier: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for i in 0..n {
            seen.insert(1 << i);
        }
        let mut out = frontier.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                for x in 0..n {
                    if s.contains(&x) || !s.iter().any(|&y| self.comparable(x, y)) {
                        continue;
                    }
                    let mut t = s.clone();
                    t.push(x);
                    t.sort_unstable();
                    let m = t.iter().fold(0u32, |m, &i| m | (1 << i));
                    if seen.contains(&m) || self.induced(&t).height() >= 3 {
                        continue;
                    }
                    seen.insert(m);
                    next.push(t);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(out)
    }
}

fn dedup_len(s: &[usize]) -> usize {
    s.iter().collect::<BTreeSet<_>>().len()
}

/// An order-embedding `X -> P`, stored in canonical form.
#[derive(Clone, Debug)]
pub struct OrderEmbedding {
    source: Arc<Poset>,
    target: Arc<Poset>,
    map: Vec<usize>,
}

impl PartialEq for OrderEmbedding {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && *self.source == *other.source && *self.target == *other.target
    }
}

impl OrderEmbedding {
    /// Validates the embedding condition; does not canonicalize.
    pub fn new(source: Arc<Poset>, target: Arc<Poset>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::NotAnEmbedding(format!(
                "{} images for {} elements",
                map.len(),
                source.len()
            )));
        }
        if map.iter().any(|&p| p >= target.len()) {
            return Err(Error::NotAnEmbedding("image out of range".into()));
        }
        for x in 0..map.len() {
            for y in 0..map.len() {
                if source.leq(x, y) != target.leq(map[x], map[y]) {
                    return Err(Error::NotAnEmbedding(format!(
                        "{} <= {} is not reflected by the images",
                        source.name(x),
                        source.name(y)
                    )));
                }
            }
        }
        Ok(OrderEmbedding {
            source,
            target,
            map,
        })
    }

    /// The identity embedding `P -> P`.
    pub fn identity(p: Arc<Poset>) -> Self {
        let map = (0..p.len()).collect();
        OrderEmbedding {
            source: p.clone(),
            target: p,
            map,
        }
    }

    pub fn source(&self) -> &Arc<Poset> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Poset> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// Sorted image.
    pub fn image(&self) -> Vec<usize> {
        let mut v = self.map.clone();
        v.sort_unstable();
        v
    }

    /// The same map between opposite posets.
    pub fn opposite(&self) -> OrderEmbedding {
        OrderEmbedding {
            source: Arc::new(self.source.opposite()),
            target: Arc::new(self.target.opposite()),
            map: self.map.clone(),
        }
    }

    /// `self o g` for `g: Y -> X`.
    pub fn compose(&self, g: &OrderEmbedding) -> OrderEmbedding {
        OrderEmbedding {
            source: g.source.clone(),
            target: self.target.clone(),
            map: g.map.iter().map(|&y| self.map[y]).collect(),
        }
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = (0..self.map.len())
            .map(|x| format!("{}->{}", self.source.name(x), self.target.name(self.map[x])))
            .collect();
        parts.join(" ")
    }
}

/// All injections `X -> P` satisfying the embedding condition, in
/// lexicographic order of their image vectors.
fn all_embeddings(x: &Poset, p: &Poset) -> Vec<Vec<usize>> {
    let n = x.len();
    if n == 0 {
        return vec![vec![]];
    }
    if n > p.len() {
        return vec![];
    }
    // Comparability-degree pruning: an image needs at least as many
    // elements above and below it as its preimage.
    let ups: Vec<usize> = (0..n).map(|i| x.up_set(i).len()).collect();
    let downs: Vec<usize> = (0..n).map(|i| x.down_set(i).len()).collect();
    let pups: Vec<usize> = (0..p.len()).map(|i| p.up_set(i).len()).collect();
    let pdowns: Vec<usize> = (0..p.len()).map(|i| p.down_set(i).len()).collect();
    let ok = |i: usize, c: usize| pups[c] >= ups[i] && pdowns[c] >= downs[i];

    fn extend(
        x: &Poset,
        p: &Poset,
        ok: &dyn Fn(usize, usize) -> bool,
        cur: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = cur.len();
        if i == x.len() {
            out.push(cur.clone());
            return;
        }
        for c in 0..p.len() {
            if used[c] || !ok(i, c) {
                continue;
            }
            let fits =
                (0..i).all(|j| x.leq(j, i) == p.leq(cur[j], c) && x.leq(i, j) == p.leq(c, cur[j]));
            if !fits {
                continue;
            }
            used[c] = true;
            cur.push(c);
            extend(x, p, ok, cur, used, out);
            cur.pop();
            used[c] = false;
        }
    }

    let starts: Vec<usize> = (0..p.len()).filter(|&c| ok(0, c)).collect();
    let chunks: Vec<Vec<Vec<usize>>> = starts
        .par_iter()
        .map(|&c| {
            let mut out = Vec::new();
            let mut used = vec![false; p.len()];
            used[c] = true;
            let mut cur = vec![c];
            extend(x, p, &ok, &mut cur, &mut used, &mut out);
            out
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// All order-automorphisms of `x`, as permutation vectors (identity first).
pub fn poset_automorphisms(x: &Poset) -> Vec<Vec<usize>> {
    all_embeddings(x, x)
}

/// One canonical representative per Aut(X)-orbit, sorted.
pub fn enumerate_embeddings(x: &Arc<Poset>, p: &Arc<Poset>) -> Vec<OrderEmbedding> {
    let autos = poset_automorphisms(x);
    let mut reps: Vec<Vec<usize>> = all_embeddings(x, p)
        .into_par_iter()
        .filter(|f| {
            autos.iter().all(|s| {
                let g: Vec<usize> = s.iter().map(|&y| f[y]).collect();
                *f <= g
            })
        })
        .collect();
    reps.sort();
    reps.into_iter()
        .map(|map| OrderEmbedding {
            source: x.clone(),
            target: p.clone(),
            map,
        })
        .collect()
}

/// Canonical form of an arbitrary embedding.
pub fn canonicalize(f: &OrderEmbedding) -> OrderEmbedding {
    let best = poset_automorphisms(&f.source)
        .into_iter()
        .map(|s| s.iter().map(|&y| f.map[y]).collect::<Vec<_>>())
        .min()
        .expect("identity is an automorphism");
    OrderEmbedding {
        source: f.source.clone(),
        target: f.target.clone(),
        map: best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn diamond() -> Poset {
        Poset::from_relations(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
        )
        .unwrap()
    }

    fn ids(p: &Poset, names: &[&str]) -> Vec<usize> {
        let mut v: Vec<usize> = names.iter().map(|n| p.id(n).unwrap()).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn construction() {
        let one = Poset::from_relations(&["a"], &[]).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one.covers().is_empty());
        let x2 = Poset::from_relations(&["1", "2"], &[("1", "2")]).unwrap();
        assert_eq!(x2.covers(), &[(0, 1)]);
        assert_eq!(
            Poset::from_relations(&["a", "b"], &[("a", "b"), ("b", "a")]),
            Err(Error::Cycle("a".into(), "b".into()))
        );
        assert!(matches!(
            Poset::from_relations(&["a"], &[("a", "z")]),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn grids() {
        assert_eq!(Poset::grid(1, 1).len(), 1);
        let g = Poset::grid(2, 2);
        assert_eq!(g.covers().len(), 4);
        let g = Poset::grid(3, 3);
        assert_eq!((g.len(), g.covers().len()), (9, 12));
        let g = Poset::grid(3, 4);
        assert_eq!(g.covers().len(), 3 * 3 + 4 * 2);
        assert_eq!(Poset::staircase_grid(3, 3).len(), 15);
    }

    #[test]
    fn hulls_and_intervals() {
        let d = diamond();
        assert_eq!(d.convex_hull(&ids(&d, &["a"])).unwrap(), ids(&d, &["a"]));
        assert_eq!(
            d.convex_hull(&ids(&d, &["a", "d"])).unwrap(),
            ids(&d, &["a", "b", "c", "d"])
        );
        assert_eq!(d.convex_hull(&[]), Err(Error::EmptySubset));
        assert!(!d.is_interval(&ids(&d, &["b", "c"])));
        assert!(d.is_interval(&ids(&d, &["a", "b", "c"])));
        assert_eq!(d.intervals().unwrap().len(), 11);

        let g = Poset::grid(3, 3);
        let s = ids(&g, &["2,1", "1,2", "3,2", "2,3"]);
        let hull = g.convex_hull(&s).unwrap();
        let expect: Vec<usize> = (0..9)
            .filter(|&k| {
                let (i, j) = (k / 3 + 1, k % 3 + 1);
                (3..=5).contains(&(i + j))
            })
            .collect();
        assert_eq!(hull, expect);
    }

    #[test]
    fn embeddings() {
        let fork =
            Arc::new(Poset::from_relations(&["1", "2", "3"], &[("1", "2"), ("1", "3")]).unwrap());
        let d = Arc::new(diamond());
        assert_eq!(enumerate_embeddings(&fork, &d).len(), 1);
        let chain = Arc::new(Poset::chain(3));
        let p = Arc::new(
            Poset::from_relations(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("b", "d")])
                .unwrap(),
        );
        assert_eq!(enumerate_embeddings(&chain, &p).len(), 2);
        assert_eq!(enumerate_embeddings(&fork, &p).len(), 2);
        let one = Arc::new(Poset::chain(1));
        assert_eq!(enumerate_embeddings(&one, &p).len(), 4);
        let two = Arc::new(Poset::chain(2));
        assert_eq!(enumerate_embeddings(&two, &d).len(), 5);
    }

    #[test]
    fn automorphisms() {
        assert_eq!(poset_automorphisms(&Poset::chain(2)).len(), 1);
        let fork = Poset::from_relations(&["1", "2", "3"], &[("1", "2"), ("1", "3")]).unwrap();
        assert_eq!(
            poset_automorphisms(&fork),
            vec![vec![0, 1, 2], vec![0, 2, 1]]
        );
        assert_eq!(poset_automorphisms(&diamond()).len(), 2);
    }

    #[test]
    fn opposites() {
        let x2 = Poset::chain(2).opposite();
        assert!(x2.leq(1, 0) && !x2.leq(0, 1));
        let g = Poset::grid(3, 2);
        assert_eq!(g.opposite().opposite(), g);
    }
}
