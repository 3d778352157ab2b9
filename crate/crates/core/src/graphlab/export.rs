use std::io::{self, Write};

use super::Graph;

/// One line per vertex: the vertex followed by its neighbours.
pub fn write_adjacency_list<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    for x in 0..g.n() {
        write!(out, "{x}:")?;
        for y in g.neighbors(x) {
            write!(out, " {y}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// One `x y` line per edge with `x < y`.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    for (x, y) in g.edges() {
        writeln!(out, "{x} {y}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphlab::{build, GraphSpec};

    #[test]
    fn triangle_exports() {
        let g = build(&GraphSpec::Hamming { d: 1, q: 3 }).unwrap();
        let mut adj = Vec::new();
        write_adjacency_list(&g, &mut adj).unwrap();
        assert_eq!(String::from_utf8(adj).unwrap(), "0: 1 2\n1: 0 2\n2: 0 1\n");
        let mut edges = Vec::new();
        write_edge_list(&g, &mut edges).unwrap();
        assert_eq!(String::from_utf8(edges).unwrap(), "0 1\n0 2\n1 2\n");
    }
}
