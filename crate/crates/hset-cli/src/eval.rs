//! Expression evaluation: literals become containers, operators and
//! relations delegate to the library.

use std::fmt;

use hset_core::element::Element;
use hset_core::hset::HSet;
use hset_core::operations::{hset_operation, OpSpec};
use hset_core::relations::{equal, included, inclusion_element, RelationKind};

use crate::parser::{ElementLit, Expr, RelOp, SetLiteral};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub msg: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type error: {}", self.msg)
    }
}

impl std::error::Error for EvalError {}

pub enum Output {
    Set(HSet),
    Bool(bool),
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Set(h) => write!(f, "{h}"),
            Output::Bool(b) => write!(f, "{b}"),
        }
    }
}

fn element_of(lit: &ElementLit) -> Element {
    match lit {
        // The lexer only produces finite numbers.
        ElementLit::Num(x) => Element::num(*x).expect("literals are finite"),
        ElementLit::Set(members) => Element::set(members.iter().map(element_of).collect()),
    }
}

/// Build the container a literal denotes. Duplicates collapse in a
/// set and sum in a multiset, like the library constructor.
fn hset_of(lit: &SetLiteral) -> HSet {
    if lit.is_multiset() {
        HSet::multiset_of(
            lit.items
                .iter()
                .map(|(item, m)| (element_of(item), m.unwrap_or(1.0))),
        )
        .expect("parser validated multiplicities")
    } else {
        HSet::set_of(lit.items.iter().map(|(item, _)| element_of(item)))
    }
}

fn want_set(out: Output, context: &str) -> Result<HSet, EvalError> {
    match out {
        Output::Set(h) => Ok(h),
        Output::Bool(_) => Err(EvalError {
            msg: format!("{context} needs set operands, got a relation result"),
        }),
    }
}

pub fn eval(expr: &Expr) -> Result<Output, EvalError> {
    match expr {
        Expr::Literal(lit) => Ok(Output::Set(hset_of(lit))),
        Expr::Op {
            op,
            semantic,
            lhs,
            rhs,
        } => {
            let l = want_set(eval(lhs)?, "an operator")?;
            let r = want_set(eval(rhs)?, "an operator")?;
            // Operands here are evaluation temporaries, so Refer
            // mutating `l` in place is invisible from outside; the
            // semantic still matters for library users.
            Ok(Output::Set(hset_operation(
                &l,
                &[&r],
                &OpSpec::for_name(*op),
                *semantic,
            )))
        }
        Expr::Rel { rel, lhs, rhs } => {
            let l = want_set(eval(lhs)?, "a relation")?;
            let r = want_set(eval(rhs)?, "a relation")?;
            let b = match rel {
                RelOp::Subset => included(&l, &r, false, false),
                RelOp::StrictSubset => included(&l, &r, true, false),
                RelOp::Equal => equal(&l, &r),
                RelOp::ExactSubset => included(&l, &r, false, true),
                RelOp::StrictExactSubset => included(&l, &r, true, true),
            };
            Ok(Output::Bool(b))
        }
        Expr::Membership { member, rhs } => {
            let r = want_set(eval(rhs)?, "'in'")?;
            let e = element_of(member);
            Ok(Output::Bool(inclusion_element(
                &e,
                &r,
                1.0,
                RelationKind::Le,
            )))
        }
    }
}

/// Parse, evaluate, render — the `eval` subcommand in one call.
pub fn eval_str(text: &str) -> Result<String, String> {
    let expr = crate::parser::parse(text).map_err(|e| e.to_string())?;
    let out = eval(&expr).map_err(|e| e.to_string())?;
    Ok(out.to_string())
}
