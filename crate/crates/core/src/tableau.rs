//! Butcher tableaus for explicit Runge-Kutta schemes, their consistency and
//! order-condition checks, and validation of the k-multiplier vectors used by
//! the relaxation-free update.
//!
//! The four registered schemes (SSPRK22, SSPRK33, RK44, BSRK85) are loaded
//! from `data/tableaus.txt`, which stores every coefficient as a decimal
//! literal with 17 significant digits. The order-condition check doubles as
//! the transcription oracle for the BSRK85 coefficients.

use thiserror::Error;

/// Identities that hold exactly by construction are checked to this slack.
pub const EXACT_TOL: f64 = 1e-14;
/// Order-condition residuals below this count as satisfied.
pub const ORDER_CONDITION_TOL: f64 = 1e-13;
/// Nondegeneracy threshold on `|sum k_i c_i|`.
pub const K_DEGENERACY_TOL: f64 = 1e-12;

const TABLEAU_DATA: &str = include_str!("../data/tableaus.txt");

/// The names accepted by [`builtin_tableau`].
pub const BUILTIN_SCHEMES: [&str; 4] = ["SSPRK22", "SSPRK33", "RK44", "BSRK85"];

#[derive(Debug, Error)]
pub enum TableauError {
    #[error("unknown scheme `{0}` (registered: SSPRK22, SSPRK33, RK44, BSRK85)")]
    UnknownScheme(String),
    #[error("tableau `{name}` failed validation: {first_failure}")]
    Invalid { name: String, first_failure: String },
    #[error("tableau data parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Error)]
pub enum KVectorError {
    #[error("k has {got} entries but the tableau has {expected} stages")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sum of k entries is {sum:e}, not 0")]
    SumNonzero { sum: f64 },
    #[error("|sum k_i c_i| = {kc_sum:e} is below the degeneracy threshold")]
    Degenerate { kc_sum: f64 },
}

/// Coefficients of an explicit Runge-Kutta scheme.
///
/// Immutable after construction; `new` enforces the structural invariants
/// (strictly lower-triangular `A`, row sums matching `c`, consistent `b`).
#[derive(Debug, Clone)]
pub struct ButcherTableau {
    name: String,
    s: usize,
    p: usize,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl ButcherTableau {
    pub fn new(
        name: impl Into<String>,
        p: usize,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: Vec<f64>,
    ) -> Result<Self, TableauError> {
        let t = Self::from_parts_unchecked(name, p, a, b, c);
        let report = validate_tableau(&t);
        match report.first_failure() {
            None => Ok(t),
            Some(check) => Err(TableauError::Invalid {
                name: t.name,
                first_failure: format!("{} (residual {:e})", check.name, check.residual),
            }),
        }
    }

    /// Builds without validating. Intended for exercising [`validate_tableau`]
    /// on deliberately broken data.
    pub fn from_parts_unchecked(
        name: impl Into<String>,
        p: usize,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: Vec<f64>,
    ) -> Self {
        let s = b.len();
        assert_eq!(a.len(), s, "A must be s x s");
        assert!(a.iter().all(|row| row.len() == s), "A must be s x s");
        assert_eq!(c.len(), s, "c must have length s");
        assert!(s > 0 && p > 0, "stage count and order must be positive");
        ButcherTableau {
            name: name.into(),
            s,
            p,
            a,
            b,
            c,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Stage count `s`.
    pub fn stages(&self) -> usize {
        self.s
    }

    /// Declared order `p`.
    pub fn order(&self) -> usize {
        self.p
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn a_row(&self, i: usize) -> &[f64] {
        &self.a[i]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }
}

/// One named residual check.
#[derive(Debug, Clone)]
pub struct ValidationCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Pass/fail report over all tableau invariants.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&ValidationCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Checks explicitness, row sums, and weight consistency, reporting the
/// measured residual of each.
pub fn validate_tableau(t: &ButcherTableau) -> ValidationReport {
    let mut checks = Vec::new();

    let mut upper = 0.0f64;
    for i in 0..t.s {
        for j in i..t.s {
            upper = upper.max(t.a[i][j].abs());
        }
    }
    checks.push(ValidationCheck {
        name: "A strictly lower triangular".into(),
        residual: upper,
        tolerance: 0.0,
        pass: upper == 0.0,
    });

    for i in 0..t.s {
        let row_sum: f64 = t.a[i].iter().sum();
        let residual = (row_sum - t.c[i]).abs();
        checks.push(ValidationCheck {
            name: format!("c[{i}] = sum_j A[{i}][j]"),
            residual,
            tolerance: EXACT_TOL,
            pass: residual <= EXACT_TOL,
        });
    }

    let b_sum: f64 = t.b.iter().sum();
    let residual = (b_sum - 1.0).abs();
    checks.push(ValidationCheck {
        name: "sum b = 1".into(),
        residual,
        tolerance: EXACT_TOL,
        pass: residual <= EXACT_TOL,
    });

    ValidationReport { checks }
}

/// One rooted-tree order condition with its measured residual.
#[derive(Debug, Clone)]
pub struct OrderCondition {
    pub order: usize,
    pub label: &'static str,
    pub residual: f64,
}

/// Residuals of the classical order conditions through `up_to` (at most 5).
pub fn check_order_conditions(t: &ButcherTableau, up_to: usize) -> Vec<OrderCondition> {
    assert!(
        (1..=5).contains(&up_to),
        "order conditions implemented through 5"
    );
    let s = t.s;
    let b = &t.b;
    let c = &t.c;

    // stage-indexed building blocks
    let apply_a = |v: &[f64]| -> Vec<f64> {
        (0..s)
            .map(|i| (0..s).map(|j| t.a[i][j] * v[j]).sum())
            .collect()
    };
    let c2: Vec<f64> = c.iter().map(|x| x * x).collect();
    let c3: Vec<f64> = c.iter().map(|x| x * x * x).collect();
    let c4: Vec<f64> = c.iter().map(|x| x * x * x * x).collect();
    let ac = apply_a(c);
    let aac = apply_a(&ac);
    let aaac = apply_a(&aac);
    let ac2 = apply_a(&c2);
    let ac3 = apply_a(&c3);
    let aac2 = apply_a(&ac2);
    let c_ac: Vec<f64> = (0..s).map(|i| c[i] * ac[i]).collect();
    let a_cac = apply_a(&c_ac);

    let dot = |v: &[f64]| -> f64 { (0..s).map(|i| b[i] * v[i]).sum() };
    let ones = vec![1.0; s];

    let mut out = vec![OrderCondition {
        order: 1,
        label: "sum b_i = 1",
        residual: dot(&ones) - 1.0,
    }];
    if up_to >= 2 {
        out.push(OrderCondition {
            order: 2,
            label: "sum b_i c_i = 1/2",
            residual: dot(c) - 0.5,
        });
    }
    if up_to >= 3 {
        out.push(OrderCondition {
            order: 3,
            label: "sum b_i c_i^2 = 1/3",
            residual: dot(&c2) - 1.0 / 3.0,
        });
        out.push(OrderCondition {
            order: 3,
            label: "sum b_i (Ac)_i = 1/6",
            residual: dot(&ac) - 1.0 / 6.0,
        });
    }
    if up_to >= 4 {
        let c_ac_v: Vec<f64> = (0..s).map(|i| c[i] * ac[i]).collect();
        out.push(OrderCondition {
            order: 4,
            label: "sum b_i c_i^3 = 1/4",
            residual: dot(&c3) - 0.25,
        });
        out.push(OrderCondition {
            order: 4,
            label: "sum b_i c_i (Ac)_i = 1/8",
            residual: dot(&c_ac_v) - 0.125,
        });
        out.push(OrderCondition {
            order: 4,
            label: "sum b_i (Ac^2)_i = 1/12",
            residual: dot(&ac2) - 1.0 / 12.0,
        });
        out.push(OrderCondition {
            order: 4,
            label: "sum b_i (AAc)_i = 1/24",
            residual: dot(&aac) - 1.0 / 24.0,
        });
    }
    if up_to >= 5 {
        let c2_ac: Vec<f64> = (0..s).map(|i| c2[i] * ac[i]).collect();
        let ac_ac: Vec<f64> = (0..s).map(|i| ac[i] * ac[i]).collect();
        let c_ac2: Vec<f64> = (0..s).map(|i| c[i] * ac2[i]).collect();
        let c_aac: Vec<f64> = (0..s).map(|i| c[i] * aac[i]).collect();
        out.push(OrderCondition {
            order: 5,
            label: "sum b_i c_i^4 = 1/5",
            residual: dot(&c4) - 0.2,
        });
        out.push(OrderCondition {
            order: 5,
            label: "sum b_i c_i^2 (Ac)_i = 1/10",
            residual: dot(&c2_ac) - 0.1,
        });
        out.push(OrderCondition {
            order: 5,
            label: "sum b_i (Ac)_i^2 = 1/20",
            residual: dot(&ac_ac) - 0.05,
        });
        out.push(OrderCondition {
            order: 5,
            label: "sum b_i c_i (Ac^2)_i = 1/15",
            residual: dot(&c_ac2) - 1.0 / 15.0,
        });
        out.push(OrderCondition {
            order: 5,
            label: "sum b_i (Ac^3)_i = 1/20",
            residual: dot(&ac3) - 0.05,
        });
        out.push(OrderCondition {
            order: 5,
            label: "sum b_i c_i (AAc)_i = 1/30",
            residual: dot(&c_aac) - 1.0 / 30.0,
        });
        out.push(OrderCondition {
            order: 5,
            label: "sum b_i (A(cAc))_i = 1/40",
            residual: dot(&a_cac) - 0.025,
        });
        out.push(OrderCondition {
            order: 5,
            label: "sum b_i (AAc^2)_i = 1/60",
            residual: dot(&aac2) - 1.0 / 60.0,
        });
        out.push(OrderCondition {
            order: 5,
            label: "sum b_i (AAAc)_i = 1/120",
            residual: dot(&aaac) - 1.0 / 120.0,
        });
    }
    out
}

/// True when every condition through order `p` has residual within
/// [`ORDER_CONDITION_TOL`].
pub fn satisfies_order(t: &ButcherTableau, p: usize) -> bool {
    check_order_conditions(t, p)
        .iter()
        .all(|c| c.residual.abs() <= ORDER_CONDITION_TOL)
}

/// Multipliers defining the relaxation-free perturbation direction:
/// `sum k_i = 0` and `sum k_i c_i != 0`.
#[derive(Debug, Clone)]
pub struct KVector {
    k: Vec<f64>,
    kc_sum: f64,
}

impl KVector {
    pub fn entries(&self) -> &[f64] {
        &self.k
    }

    /// Cached `sum k_i c_i`.
    pub fn kc_sum(&self) -> f64 {
        self.kc_sum
    }

    pub fn max_abs(&self) -> f64 {
        self.k.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Validates a raw multiplier vector against a tableau.
pub fn validate_k(t: &ButcherTableau, k: &[f64]) -> Result<KVector, KVectorError> {
    if k.len() != t.s {
        return Err(KVectorError::LengthMismatch {
            expected: t.s,
            got: k.len(),
        });
    }
    let sum: f64 = k.iter().sum();
    // the zero-sum condition is homogeneous; scale the slack with |k|
    let scale = k.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if sum.abs() > EXACT_TOL * scale {
        return Err(KVectorError::SumNonzero { sum });
    }
    let kc_sum: f64 = k.iter().zip(t.c()).map(|(ki, ci)| ki * ci).sum();
    if kc_sum.abs() <= K_DEGENERACY_TOL * scale {
        return Err(KVectorError::Degenerate { kc_sum });
    }
    Ok(KVector {
        k: k.to_vec(),
        kc_sum,
    })
}

/// Returns a registered tableau. Names are case-insensitive and punctuation
/// such as `SSPRK(3,3)` is tolerated.
pub fn builtin_tableau(name: &str) -> Result<ButcherTableau, TableauError> {
    let wanted = canonical_name(name);
    for t in parse_tableau_records(TABLEAU_DATA)? {
        if t.name() == wanted {
            return Ok(t);
        }
    }
    Err(TableauError::UnknownScheme(name.to_string()))
}

/// The multiplier vector conventionally paired with each registered scheme.
pub fn builtin_k_vector(t: &ButcherTableau) -> Option<KVector> {
    let raw: &[f64] = match t.name() {
        "SSPRK22" => &[1.0, -1.0],
        "SSPRK33" => &[2.0, -1.0, -1.0],
        "RK44" => &[1.0, 2.0, -2.0, -1.0],
        "BSRK85" => &[2.0, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        _ => return None,
    };
    Some(validate_k(t, raw).expect("builtin k vectors are valid"))
}

fn canonical_name(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_uppercase()
}

/// Parses the plain-text tableau format: per record a `name s p` header line
/// followed by the `s` rows of `A`, then `b`, then `c`, whitespace separated.
/// `#` starts a comment.
pub fn parse_tableau_records(text: &str) -> Result<Vec<ButcherTableau>, TableauError> {
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            tokens.push((lineno + 1, tok));
        }
    }

    let mut out = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        let (line, name) = tokens[pos];
        let parse_usize = |idx: usize, what: &str| -> Result<usize, TableauError> {
            tokens
                .get(idx)
                .ok_or_else(|| TableauError::Parse {
                    line,
                    message: format!("record `{name}` truncated before {what}"),
                })?
                .1
                .parse()
                .map_err(|_| TableauError::Parse {
                    line: tokens[idx].0,
                    message: format!("bad {what} in record `{name}`"),
                })
        };
        let s = parse_usize(pos + 1, "stage count")?;
        let p = parse_usize(pos + 2, "order")?;
        pos += 3;

        let mut take = |n: usize| -> Result<Vec<f64>, TableauError> {
            let mut vals = Vec::with_capacity(n);
            for _ in 0..n {
                let (l, tok) = *tokens.get(pos).ok_or(TableauError::Parse {
                    line,
                    message: format!("record `{name}` truncated"),
                })?;
                vals.push(tok.parse().map_err(|_| TableauError::Parse {
                    line: l,
                    message: format!("bad coefficient `{tok}`"),
                })?);
                pos += 1;
            }
            Ok(vals)
        };

        let mut a = Vec::with_capacity(s);
        for _ in 0..s {
            a.push(take(s)?);
        }
        let b = take(s)?;
        let c = take(s)?;
        out.push(ButcherTableau::new(name, p, a, b, c)?);
    }
    Ok(out)
}
