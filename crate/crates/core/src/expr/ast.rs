use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl UnaryOp {
    pub(crate) fn function_name(self) -> Option<&'static str> {
        Some(match self {
            UnaryOp::Neg => return None,
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
        })
    }

    pub(crate) fn from_function_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "tan" => UnaryOp::Tan,
            "exp" => UnaryOp::Exp,
            "log" => UnaryOp::Log,
            "sqrt" => UnaryOp::Sqrt,
            "abs" => UnaryOp::Abs,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    /// The exponent subtree is always free of the variable.
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedConst {
    Pi,
    E,
}

impl NamedConst {
    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => std::f64::consts::PI,
            NamedConst::E => std::f64::consts::E,
        }
    }
}

/// A parsed scalar function of one real variable.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Named(NamedConst),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(v: f64) -> Self {
        Expr::Const(v)
    }

    pub fn unary(op: UnaryOp, arg: Expr) -> Self {
        Expr::Unary(op, Box::new(arg))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// True when the tree does not reference the variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Var => false,
            Expr::Const(_) | Expr::Named(_) => true,
            Expr::Unary(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var | Expr::Named(_) => 1,
            Expr::Unary(_, a) => 1 + a.node_count(),
            Expr::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    fn level(&self) -> Level {
        match self {
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => Level::Sum,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => Level::Term,
            Expr::Binary(BinaryOp::Pow, ..) => Level::Factor,
            Expr::Unary(UnaryOp::Neg, _) => Level::Unary,
            // A negative literal only prints safely inside parentheses.
            Expr::Const(v) if v.is_sign_negative() => Level::Sum,
            _ => Level::Atom,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: Level) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.write_node(f)?;
            write!(f, ")")
        } else {
            self.write_node(f)
        }
    }

    fn write_node(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v:?}"),
            Expr::Var => write!(f, "t"),
            Expr::Named(NamedConst::Pi) => write!(f, "pi"),
            Expr::Named(NamedConst::E) => write!(f, "e"),
            // `-2` would read back as a negative literal
            Expr::Unary(UnaryOp::Neg, a) if matches!(**a, Expr::Const(v) if !v.is_sign_negative()) => {
                write!(f, "-(")?;
                a.write_node(f)?;
                write!(f, ")")
            }
            Expr::Unary(UnaryOp::Neg, a) => {
                write!(f, "-")?;
                a.write_at(f, Level::Atom)
            }
            Expr::Unary(op, a) => {
                write!(f, "{}(", op.function_name().unwrap_or("?"))?;
                a.write_at(f, Level::Sum)?;
                write!(f, ")")
            }
            Expr::Binary(op, a, b) => {
                let (sym, lhs, rhs) = match op {
                    BinaryOp::Add => (" + ", Level::Sum, Level::Term),
                    BinaryOp::Sub => (" - ", Level::Sum, Level::Term),
                    BinaryOp::Mul => ("*", Level::Term, Level::Factor),
                    BinaryOp::Div => ("/", Level::Term, Level::Factor),
                    BinaryOp::Pow => ("^", Level::Unary, Level::Unary),
                };
                a.write_at(f, lhs)?;
                write!(f, "{sym}")?;
                b.write_at(f, rhs)
            }
        }
    }
}

/// Grammar levels, loosest first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Sum,
    Term,
    Factor,
    Unary,
    Atom,
}

/// Canonical printer. Output re-parses to a structurally equal tree and
/// always spells the variable `t`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, Level::Sum)
    }
}
