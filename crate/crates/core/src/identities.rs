//! The eighteen identities of the algebra of preferences, as builders over
//! three atoms, and a randomized suite that checks each one both
//! symbolically (canonical forms agree) and on the grid (domains agree).

use std::sync::Arc;

use rand::Rng;

use crate::domain::{domains_equal, eval_domain};
use crate::error::Result;
use crate::expr::{canonical_equal, Atom, PreferenceExpr};
use crate::gen::{random_atom, random_space};

/// Each builder returns expressions that must all denote the same domain.
pub struct Identity {
    pub name: &'static str,
    pub build: fn(&Atom, &Atom, &Atom) -> Vec<PreferenceExpr>,
}

fn at(a: &Atom) -> PreferenceExpr {
    PreferenceExpr::Atom(a.clone())
}

fn not(e: PreferenceExpr) -> PreferenceExpr {
    PreferenceExpr::not(e)
}

fn and<const N: usize>(cs: [PreferenceExpr; N]) -> PreferenceExpr {
    PreferenceExpr::and(cs)
}

fn or<const N: usize>(cs: [PreferenceExpr; N]) -> PreferenceExpr {
    PreferenceExpr::or(cs)
}

/// Rows of conjunction identities and their disjunction duals.
pub const IDENTITIES: [Identity; 18] = [
    Identity {
        name: "double complement (conjunction column)",
        build: |x, _, _| vec![not(not(at(x))), at(x)],
    },
    Identity {
        name: "double complement (disjunction column)",
        build: |_, y, _| vec![not(not(at(y))), at(y)],
    },
    Identity {
        name: "conjunction idempotence",
        build: |x, _, _| vec![and([at(x), at(x)]), at(x)],
    },
    Identity {
        name: "disjunction idempotence",
        build: |x, _, _| vec![or([at(x), at(x)]), at(x)],
    },
    Identity {
        name: "conjunction commutativity",
        build: |x, y, _| vec![and([at(x), at(y)]), and([at(y), at(x)])],
    },
    Identity {
        name: "disjunction commutativity",
        build: |x, y, _| vec![or([at(x), at(y)]), or([at(y), at(x)])],
    },
    Identity {
        name: "complement of conjunction",
        build: |x, y, _| vec![not(and([at(x), at(y)])), or([not(at(x)), not(at(y))])],
    },
    Identity {
        name: "complement of disjunction",
        build: |x, y, _| vec![not(or([at(x), at(y)])), and([not(at(x)), not(at(y))])],
    },
    Identity {
        name: "conjunction associativity",
        build: |x, y, z| {
            vec![
                and([and([at(x), at(y)]), at(z)]),
                and([at(x), and([at(y), at(z)])]),
                and([at(x), at(y), at(z)]),
            ]
        },
    },
    Identity {
        name: "disjunction associativity",
        build: |x, y, z| {
            vec![
                or([or([at(x), at(y)]), at(z)]),
                or([at(x), or([at(y), at(z)])]),
                or([at(x), at(y), at(z)]),
            ]
        },
    },
    Identity {
        name: "conjunction distributes over disjunction",
        build: |x, y, z| {
            vec![
                and([or([at(x), at(y)]), at(z)]),
                or([and([at(x), at(z)]), and([at(y), at(z)])]),
            ]
        },
    },
    Identity {
        name: "disjunction distributes over conjunction",
        build: |x, y, z| {
            vec![
                or([and([at(x), at(y)]), at(z)]),
                and([or([at(x), at(z)]), or([at(y), at(z)])]),
            ]
        },
    },
    Identity {
        name: "absorption into conjunction",
        build: |x, y, _| vec![and([or([at(x), at(y)]), at(x)]), at(x)],
    },
    Identity {
        name: "absorption into disjunction",
        build: |x, y, _| vec![or([and([at(x), at(y)]), at(x)]), at(x)],
    },
    Identity {
        name: "tautology is the conjunction identity",
        build: |x, y, _| vec![and([or([at(x), not(at(x))]), at(y)]), at(y)],
    },
    Identity {
        name: "contradiction is the disjunction identity",
        build: |x, y, _| vec![or([and([at(x), not(at(x))]), at(y)]), at(y)],
    },
    Identity {
        name: "tautology annihilates disjunction",
        build: |x, y, _| vec![or([at(x), not(at(x)), at(y)]), or([at(x), not(at(x))])],
    },
    Identity {
        name: "contradiction annihilates conjunction",
        build: |x, y, _| vec![and([at(x), not(at(x)), at(y)]), and([at(x), not(at(x))])],
    },
];

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub name: &'static str,
    pub trials: usize,
    pub canonical_failures: usize,
    pub domain_failures: usize,
    /// First failing instance, as formatted expressions.
    pub first_failure: Option<Vec<String>>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.canonical_failures == 0 && self.domain_failures == 0
    }
}

/// Check every identity `trials` times, each on a fresh random space with
/// `attrs` attributes of `levels` levels and three random atoms.
pub fn run_identity_suite<R: Rng + ?Sized>(
    rng: &mut R,
    attrs: usize,
    levels: usize,
    trials: usize,
) -> Result<Vec<IdentityReport>> {
    let mut reports: Vec<IdentityReport> = IDENTITIES
        .iter()
        .map(|id| IdentityReport {
            name: id.name,
            trials,
            canonical_failures: 0,
            domain_failures: 0,
            first_failure: None,
        })
        .collect();
    for _ in 0..trials {
        let space = Arc::new(random_space(rng, attrs, levels)?);
        let (x, y, z) = (
            random_atom(rng, &space),
            random_atom(rng, &space),
            random_atom(rng, &space),
        );
        for (identity, report) in IDENTITIES.iter().zip(reports.iter_mut()) {
            let sides = (identity.build)(&x, &y, &z);
            let reference = eval_domain(&sides[0], &space)?;
            let mut canonical_ok = true;
            let mut domain_ok = true;
            for other in &sides[1..] {
                canonical_ok &= canonical_equal(&sides[0], other);
                domain_ok &= domains_equal(&reference, &eval_domain(other, &space)?)?;
            }
            report.canonical_failures += usize::from(!canonical_ok);
            report.domain_failures += usize::from(!domain_ok);
            if !(canonical_ok && domain_ok) && report.first_failure.is_none() {
                report.first_failure = Some(sides.iter().map(|e| e.to_string()).collect());
            }
        }
    }
    Ok(reports)
}
