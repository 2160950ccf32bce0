//! Built-in well-labelled initial meshes.

use super::{SpaceDomain, Simplex};

/// `[0, 1]` as a single tagged 1-simplex.
pub fn unit_interval_mesh() -> Vec<Simplex> {
    vec![Simplex::new(vec![vec![0.0], vec![1.0]], 1).expect("unit interval")]
}

/// Kuhn triangulation of `[0,1]^d`: one simplex per permutation `π`, with
/// vertices `0, e_{π1}, e_{π1}+e_{π2}, …, (1,…,1)` and tag `d`.
fn kuhn(d: usize) -> Vec<Simplex> {
    let mut perms = Vec::new();
    permutations(&mut (0..d).collect::<Vec<_>>(), 0, &mut perms);
    perms
        .into_iter()
        .map(|perm| {
            let mut v = vec![0.0; d];
            let mut vertices = vec![v.clone()];
            for &axis in &perm {
                v[axis] = 1.0;
                vertices.push(v.clone());
            }
            Simplex::new(vertices, d).expect("Kuhn simplex")
        })
        .collect()
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

pub fn kuhn_square() -> Vec<Simplex> {
    kuhn(2)
}

pub fn kuhn_cube() -> Vec<Simplex> {
    kuhn(3)
}

/// The unit cube `[0,1]^d` (`d ∈ {1,2,3}`) as a convex spatial domain.
pub fn unit_mesh(d: usize) -> Option<SpaceDomain> {
    let simplices = match d {
        1 => unit_interval_mesh(),
        2 => kuhn_square(),
        3 => kuhn_cube(),
        _ => return None,
    };
    Some(SpaceDomain::new(simplices, true).expect("built-in mesh"))
}
