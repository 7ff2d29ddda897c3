//! Built-in small groups with fixed element orderings.
//!
//! | family          | element `i` is                                  |
//! |-----------------|-------------------------------------------------|
//! | `Zn`, products  | mixed-radix digits, first factor least significant |
//! | `S3`            | `a=()`, `b=(1 2)`, `c=(1 3)`, `d=(2 3)`, `e=(1 2 3)`, `f=(1 3 2)` |
//! | `Dn` (order 2n) | `r^k s^j` at `k + n·j`                          |
//! | `Q8 Dic3 Q16`   | dicyclic `a^k x^j` at `k + 2m·j`, `x² = a^m`, `x a x⁻¹ = a⁻¹` |
//! | `M16`           | `a^k b^j` at `k + 8·j`, `b a b = a⁵`             |
//! | `S3xZ2`         | `(s, z)` at `s + 6·z` with `S3` as above         |
//! | `A4 S4 A5`      | permutations, identity first then lexicographic |

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, DEFAULT_MAX_ORDER};

/// Catalog names in catalog order.
pub const CATALOG: &[&str] = &[
    "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z11", "Z12", "Z13", "Z14",
    "Z15", "Z16", "Z2xZ2", "Z2xZ4", "Z2xZ2xZ2", "Z4xZ4", "S3", "D4", "Q8", "D5", "D6", "Dic3",
    "A4", "D8", "Q16", "M16", "S3xZ2", "S4", "A5",
];

fn canonical_name(name: &str) -> String {
    let n = name.replace('×', "x");
    match n.as_str() {
        "M4(16)" => "M16".to_string(),
        _ => n,
    }
}

/// Looks up a catalog group by name (`"S3"`, `"Z2xZ4"`, `"M4(16)"`, ...).
pub fn catalog(name: &str) -> Result<FiniteGroup> {
    let key = canonical_name(name);
    if let Some(rest) = key.strip_prefix('Z') {
        if !rest.contains('x') {
            if let Ok(n) = rest.parse::<usize>() {
                if (1..=16).contains(&n) {
                    return abelian(&key, &[n]);
                }
            }
        }
    }
    match key.as_str() {
        "Z2xZ2" => abelian(&key, &[2, 2]),
        "Z2xZ4" => abelian(&key, &[2, 4]),
        "Z2xZ2xZ2" => abelian(&key, &[2, 2, 2]),
        "Z4xZ4" => abelian(&key, &[4, 4]),
        "S3" => s3(),
        "D4" => dihedral(&key, 4),
        "D5" => dihedral(&key, 5),
        "D6" => dihedral(&key, 6),
        "D8" => dihedral(&key, 8),
        "Q8" => dicyclic(&key, 2),
        "Dic3" => dicyclic(&key, 3),
        "Q16" => dicyclic(&key, 4),
        "M16" => modular16(),
        "S3xZ2" => s3_times_z2(),
        "A4" => FiniteGroup::from_permutations(
            "A4",
            4,
            &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]],
            DEFAULT_MAX_ORDER,
        ),
        "S4" => FiniteGroup::from_permutations(
            "S4",
            4,
            &[vec![1, 2, 3, 0], vec![1, 0, 2, 3]],
            DEFAULT_MAX_ORDER,
        ),
        "A5" => FiniteGroup::from_permutations(
            "A5",
            5,
            &[vec![1, 2, 3, 4, 0], vec![1, 2, 0, 3, 4]],
            DEFAULT_MAX_ORDER,
        )
        .map(FiniteGroup::mark_implicit_only),
        _ => Err(Error::UnknownCatalog(name.to_string())),
    }
}

/// Every catalog group of order at most `max_order`, in catalog order.
pub fn catalog_up_to(max_order: usize) -> Vec<FiniteGroup> {
    CATALOG
        .iter()
        .map(|n| catalog(n).expect("catalog entries build"))
        .filter(|g| g.order() <= max_order)
        .collect()
}

fn abelian(name: &str, moduli: &[usize]) -> Result<FiniteGroup> {
    let n: usize = moduli.iter().product();
    let digits = |mut x: usize| -> Vec<usize> {
        moduli
            .iter()
            .map(|&m| {
                let d = x % m;
                x /= m;
                d
            })
            .collect()
    };
    FiniteGroup::from_fn(name, n, |a, b| {
        let (da, db) = (digits(a), digits(b));
        moduli
            .iter()
            .enumerate()
            .rev()
            .fold(0, |acc, (k, &m)| acc * m + (da[k] + db[k]) % m)
    })
}

fn s3() -> Result<FiniteGroup> {
    // 0-based images of the points 1, 2, 3.
    let elems: Vec<Vec<usize>> = vec![
        vec![0, 1, 2],
        vec![1, 0, 2],
        vec![2, 1, 0],
        vec![0, 2, 1],
        vec![1, 2, 0],
        vec![2, 0, 1],
    ];
    FiniteGroup::from_elements("S3", &elems, |p, q| q.iter().map(|&x| p[x]).collect())
}

fn dihedral(name: &str, n: usize) -> Result<FiniteGroup> {
    FiniteGroup::from_fn(name, 2 * n, |a, b| {
        let (i1, j1) = (a % n, a / n);
        let (i2, j2) = (b % n, b / n);
        let i = if j1 == 0 { i1 + i2 } else { i1 + n - i2 } % n;
        i + n * ((j1 + j2) % 2)
    })
}

fn dicyclic(name: &str, m: usize) -> Result<FiniteGroup> {
    let n = 2 * m;
    FiniteGroup::from_fn(name, 2 * n, |a, b| {
        let (i1, j1) = (a % n, a / n);
        let (i2, j2) = (b % n, b / n);
        match (j1, j2) {
            (0, j) => (i1 + i2) % n + n * j,
            (1, 0) => (i1 + n - i2) % n + n,
            _ => (i1 + n - i2 + m) % n,
        }
    })
}

fn modular16() -> Result<FiniteGroup> {
    FiniteGroup::from_fn("M16", 16, |a, b| {
        let (i1, j1) = (a % 8, a / 8);
        let (i2, j2) = (b % 8, b / 8);
        let twisted = if j1 == 1 { 5 * i2 } else { i2 };
        (i1 + twisted) % 8 + 8 * ((j1 + j2) % 2)
    })
}

fn s3_times_z2() -> Result<FiniteGroup> {
    let s = s3()?;
    FiniteGroup::from_fn("S3xZ2", 12, |a, b| {
        s.mul(a % 6, b % 6) + 6 * ((a / 6 + b / 6) % 2)
    })
}
