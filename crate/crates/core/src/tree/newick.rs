//! Newick reading and canonical writing.
//!
//! Grammar:
//!
//! ```text
//! tree    := subtree ";"
//! subtree := leaf | "(" subtree ("," subtree)+ ")" [":" length]
//! leaf    := integer [":" length]
//! length  := decimal | integer "/" positive-integer
//! ```
//!
//! A root of degree two is suppressed on input. Output is rooted at the
//! internal vertex next to leaf 1, children ordered by smallest leaf below.

use num_traits::Zero;

use super::{Edge, PhyloTree};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

struct Node {
    label: Option<usize>,
    children: Vec<usize>,
    length: Rational,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    nodes: Vec<Node>,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::NewickSyntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.text[self.pos..]
                .chars()
                .next()
                .map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.as_bytes().get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", b as char)))
        }
    }

    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len()
            && !matches!(bytes[self.pos], b',' | b')' | b'(' | b';' | b':')
            && !bytes[self.pos].is_ascii_whitespace()
        {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn length(&mut self) -> Result<Rational> {
        if self.peek() != Some(b':') {
            return Ok(Rational::zero());
        }
        self.pos += 1;
        let start = self.pos;
        let tok = self.token();
        rational::parse(tok, true).map_err(|_| Error::NewickSyntax {
            pos: start,
            msg: format!("bad length {tok:?}"),
        })
    }

    fn subtree(&mut self) -> Result<usize> {
        let node = if self.peek() == Some(b'(') {
            self.pos += 1;
            let mut children = vec![self.subtree()?];
            while self.peek() == Some(b',') {
                self.pos += 1;
                children.push(self.subtree()?);
            }
            self.expect(b')')?;
            if children.len() < 2 {
                return Err(self.err("a parenthesised group needs at least two children"));
            }
            Node {
                label: None,
                children,
                length: Rational::zero(),
            }
        } else {
            let start = self.pos;
            let tok = self.token();
            let label: usize = tok
                .parse()
                .ok()
                .filter(|&l| l > 0 && tok.bytes().all(|b| b.is_ascii_digit()))
                .ok_or(Error::NewickSyntax {
                    pos: start,
                    msg: format!("leaf label must be a positive integer, got {tok:?}"),
                })?;
            Node {
                label: Some(label),
                children: Vec::new(),
                length: Rational::zero(),
            }
        };
        let length = self.length()?;
        self.nodes.push(Node { length, ..node });
        Ok(self.nodes.len() - 1)
    }
}

pub fn parse_newick(text: &str) -> Result<PhyloTree> {
    let mut p = Parser {
        text,
        pos: 0,
        nodes: Vec::new(),
    };
    let root = p.subtree()?;
    p.expect(b';')?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after ';'"));
    }
    let nodes = p.nodes;
    if nodes[root].label.is_some() {
        return Err(Error::InvalidTree("a single leaf is not a tree".into()));
    }

    let mut labels: Vec<usize> = nodes.iter().filter_map(|nd| nd.label).collect();
    labels.sort_unstable();
    let n = labels.len();
    for (k, &l) in labels.iter().enumerate() {
        if l != k + 1 {
            return Err(Error::InvalidTree(if k > 0 && labels[k - 1] == l {
                format!("leaf label {l} used twice")
            } else {
                format!("leaf labels must be exactly 1..={n}; {} is missing", k + 1)
            }));
        }
    }

    let mut vertex = vec![usize::MAX; nodes.len()];
    let mut next = n;
    for (i, nd) in nodes.iter().enumerate() {
        match nd.label {
            Some(l) => vertex[i] = l - 1,
            None if i == root && nd.children.len() == 2 => {}
            None => {
                vertex[i] = next;
                next += 1;
            }
        }
    }
    let mut edges = Vec::new();
    for (i, nd) in nodes.iter().enumerate() {
        if i == root {
            continue;
        }
        for &c in &nd.children {
            edges.push(Edge::new(vertex[i], vertex[c], nodes[c].length.clone()));
        }
    }
    let top = &nodes[root];
    if top.children.len() == 2 {
        let (a, b) = (top.children[0], top.children[1]);
        edges.push(Edge::new(
            vertex[a],
            vertex[b],
            &nodes[a].length + &nodes[b].length,
        ));
    } else {
        for &c in &top.children {
            edges.push(Edge::new(vertex[root], vertex[c], nodes[c].length.clone()));
        }
    }
    PhyloTree::new(n, next, edges)
}

pub(super) fn write_newick(t: &PhyloTree) -> String {
    if t.n == 2 {
        return format!("(1:{},2:0);", rational::format(&t.edges[0].length));
    }
    let root = t.adj[0][0].0;
    let mut min_leaf = vec![usize::MAX; t.vertex_count()];
    fill_min_leaf(t, root, usize::MAX, &mut min_leaf);
    let mut out = String::from("(");
    write_children(t, root, usize::MAX, &min_leaf, &mut out);
    out.push_str(");");
    out
}

fn fill_min_leaf(t: &PhyloTree, v: usize, parent: usize, min_leaf: &mut [usize]) -> usize {
    let mut m = if v < t.n { v + 1 } else { usize::MAX };
    for &(w, _) in &t.adj[v] {
        if w != parent {
            m = m.min(fill_min_leaf(t, w, v, min_leaf));
        }
    }
    min_leaf[v] = m;
    m
}

fn write_children(t: &PhyloTree, v: usize, parent: usize, min_leaf: &[usize], out: &mut String) {
    let mut kids: Vec<(usize, usize)> = t.adj[v]
        .iter()
        .copied()
        .filter(|&(w, _)| w != parent)
        .collect();
    kids.sort_by_key(|&(w, _)| min_leaf[w]);
    for (k, (w, e)) in kids.into_iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        if w < t.n {
            out.push_str(&(w + 1).to_string());
        } else {
            out.push('(');
            write_children(t, w, v, min_leaf, out);
            out.push(')');
        }
        out.push(':');
        out.push_str(&rational::format(&t.edges[e].length));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::tree::{enumerate_topologies, TopologyMode};

    #[test]
    fn reads_zero_internal_edge() {
        let t = parse_newick("((1:1,2:1):1,(3:1,4:1):0,5:1);").unwrap();
        assert_eq!(t.n_leaves(), 5);
        assert!(t
            .edges()
            .iter()
            .enumerate()
            .any(|(e, edge)| t.is_internal_edge(e) && edge.length.is_zero()));
    }

    #[test]
    fn two_leaf_tree() {
        let t = parse_newick("(1:1,2:1);").unwrap();
        assert_eq!(t.edges().len(), 1);
        assert_eq!(t.edges()[0].length, int(2));
        let three = parse_newick("(1:3,2:0);").unwrap();
        assert_eq!(three.to_newick(), "(1:3,2:0);");
        assert_eq!(
            parse_newick(&three.to_newick())
                .unwrap()
                .leaf_distance(1, 2)
                .unwrap(),
            int(3)
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_newick("((1:1,2:1):-1,3:1,4:1);"),
            Err(Error::InvalidTree(_))
        ));
        assert!(matches!(
            parse_newick("(1:1,2:1"),
            Err(Error::NewickSyntax { .. })
        ));
        assert!(matches!(
            parse_newick("(1,1,2);"),
            Err(Error::InvalidTree(_))
        ));
        assert!(matches!(
            parse_newick("(1,3,4);"),
            Err(Error::InvalidTree(_))
        ));
        assert!(matches!(
            parse_newick("(a,b,c);"),
            Err(Error::NewickSyntax { .. })
        ));
        assert!(matches!(
            parse_newick("((1,2),3,4):x;"),
            Err(Error::NewickSyntax { .. })
        ));
        assert!(matches!(
            parse_newick("((1),2,3);"),
            Err(Error::NewickSyntax { .. })
        ));
        assert!(matches!(
            parse_newick("(1,2,3); extra"),
            Err(Error::NewickSyntax { .. })
        ));
        assert!(parse_newick("1;").is_err());
    }

    #[test]
    fn reads_rationals_and_decimals() {
        let t = parse_newick("(1:1/2, 2:0.25, 3:-3/4);").unwrap();
        assert_eq!(t.leaf_distance(1, 2).unwrap(), frac(3, 4));
        assert_eq!(t.leaf_distance(1, 3).unwrap(), frac(-1, 4));
        assert!(parse_newick("(1:1/0,2,3);").is_err());
    }

    #[test]
    fn canonical_output() {
        let star = parse_newick("(4:1,2:1,(3:1,1:1):0);")
            .unwrap()
            .canonical_form();
        assert_eq!(star.to_newick(), "(1:1,2:1,3:1,4:1);");
        let q = parse_newick("((4:1,3:1):2,(2:1/2,1:1):1);").unwrap();
        assert_eq!(q.to_newick(), "(1:1,2:1/2,(3:1,4:1):3);");
    }

    #[test]
    fn round_trip_all_five_leaf_topologies() {
        for topo in enumerate_topologies(5, TopologyMode::All).unwrap() {
            let t = topo.with_lengths(vec![int(1); topo.edge_count()]).unwrap();
            let back = parse_newick(&t.to_newick()).unwrap();
            assert!(back.same_tree(&t));
            assert_eq!(back.to_newick(), t.to_newick());
        }
    }
}
