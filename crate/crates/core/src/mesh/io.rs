//! Native plain-text mesh format.
//!
//! Layout (whitespace-delimited ASCII decimal):
//!
//! ```text
//! nodes N elements M order K
//! <id> <x> <y>          (N lines)
//! <id> <n1> <n2> ...    (M lines)
//! set <name>: <id> <id> ...
//! ```

use super::Mesh;
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

impl Mesh {
    pub fn to_native(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "nodes {} elements {} order {}",
            self.n_nodes(),
            self.n_elems(),
            self.order
        )
        .unwrap();
        for (i, c) in self.coords.iter().enumerate() {
            writeln!(s, "{} {} {}", i, c[0], c[1]).unwrap();
        }
        for (e, conn) in self.elems.iter().enumerate() {
            write!(s, "{e}").unwrap();
            for n in conn {
                write!(s, " {n}").unwrap();
            }
            s.push('\n');
        }
        for (name, set) in &self.sets {
            write!(s, "set {name}:").unwrap();
            for n in set {
                write!(s, " {n}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_native(text: &str) -> Result<Mesh> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::mesh("empty mesh file".to_string()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 || h[0] != "nodes" || h[2] != "elements" || h[4] != "order" {
            return Err(Error::mesh(format!("bad mesh header: '{header}'")));
        }
        let n: usize = h[1].parse().map_err(|_| Error::mesh("bad node count".to_string()))?;
        let m: usize = h[3]
            .parse()
            .map_err(|_| Error::mesh("bad element count".to_string()))?;
        let order: u8 = h[5].parse().map_err(|_| Error::mesh("bad order".to_string()))?;

        let mut coords = vec![[0.0, 0.0]; n];
        for _ in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::mesh("truncated node block".to_string()))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::mesh(format!("bad node line: '{line}'")));
            }
            let id: usize = f[0].parse().map_err(|_| Error::mesh("bad node id".to_string()))?;
            if id >= n {
                return Err(Error::mesh(format!("node id {id} out of range")));
            }
            coords[id] = [
                f[1].parse().map_err(|_| Error::mesh("bad node x".to_string()))?,
                f[2].parse().map_err(|_| Error::mesh("bad node y".to_string()))?,
            ];
        }
        let npe = if order == 1 { 4 } else { 8 };
        let mut elems = vec![Vec::new(); m];
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::mesh("truncated element block".to_string()))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != npe + 1 {
                return Err(Error::mesh(format!("bad element line: '{line}'")));
            }
            let id: usize = f[0]
                .parse()
                .map_err(|_| Error::mesh("bad element id".to_string()))?;
            if id >= m {
                return Err(Error::mesh(format!("element id {id} out of range")));
            }
            elems[id] = f[1..]
                .iter()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::mesh("bad connectivity entry".to_string()))?;
        }
        let mut sets = BTreeMap::new();
        for line in lines {
            let line = line.trim();
            let rest = line
                .strip_prefix("set ")
                .ok_or_else(|| Error::mesh(format!("unexpected line: '{line}'")))?;
            let (name, ids) = rest
                .split_once(':')
                .ok_or_else(|| Error::mesh(format!("bad set line: '{line}'")))?;
            let nodes = ids
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::mesh("bad set entry".to_string()))?;
            sets.insert(name.trim().to_string(), nodes);
        }
        let mesh = Mesh {
            order,
            coords,
            elems,
            sets,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn write_native(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_native())?;
        Ok(())
    }

    pub fn read_native(path: &Path) -> Result<Mesh> {
        let text = std::fs::read_to_string(path)?;
        Mesh::from_native(&text)
    }
}
