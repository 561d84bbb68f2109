use std::collections::BTreeSet;
use std::fmt;

/// A node of the grammar expression algebra.
///
/// Values are kept canonical by the smart constructors ([`Expression::seq`],
/// [`Expression::choice`], ...): sequences and choices always have at least
/// two children and never directly contain a node of their own kind. Code
/// that builds variants by hand is responsible for keeping that shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expression {
    Epsilon,
    Empty,
    Any,
    ValueStr,
    ValueInt,
    Terminal(String),
    Nonterminal(String),
    Selectable(String, Box<Expression>),
    Sequence(Vec<Expression>),
    Choice(Vec<Expression>),
    Optional(Box<Expression>),
    Star(Box<Expression>),
    Plus(Box<Expression>),
    SepListStar(Box<Expression>, Box<Expression>),
    SepListPlus(Box<Expression>, Box<Expression>),
}

impl Expression {
    /// Terminal symbol.
    ///
    /// # Panics
    ///
    /// Panics if `text` is empty.
    pub fn t(text: impl Into<String>) -> Self {
        let text = text.into();
        assert!(!text.is_empty(), "terminal text must not be empty");
        Expression::Terminal(text)
    }

    pub fn n(name: impl Into<String>) -> Self {
        Expression::Nonterminal(name.into())
    }

    pub fn sel(selector: impl Into<String>, body: Expression) -> Self {
        Expression::Selectable(selector.into(), Box::new(body))
    }

    /// Sequence with nested sequences flattened; zero parts give
    /// [`Expression::Epsilon`], one part gives the part itself.
    pub fn seq(parts: impl IntoIterator<Item = Expression>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Expression::Sequence(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expression::Epsilon,
            1 => flat.pop().unwrap(),
            _ => Expression::Sequence(flat),
        }
    }

    /// Choice with nested choices flattened; zero alternatives give
    /// [`Expression::Empty`], one gives the alternative itself.
    pub fn choice(alternatives: impl IntoIterator<Item = Expression>) -> Self {
        let mut flat = Vec::new();
        for a in alternatives {
            match a {
                Expression::Choice(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Expression::Empty,
            1 => flat.pop().unwrap(),
            _ => Expression::Choice(flat),
        }
    }

    pub fn opt(body: Expression) -> Self {
        Expression::Optional(Box::new(body))
    }

    pub fn star(body: Expression) -> Self {
        Expression::Star(Box::new(body))
    }

    pub fn plus(body: Expression) -> Self {
        Expression::Plus(Box::new(body))
    }

    pub fn sepstar(item: Expression, separator: Expression) -> Self {
        Expression::SepListStar(Box::new(item), Box::new(separator))
    }

    pub fn sepplus(item: Expression, separator: Expression) -> Self {
        Expression::SepListPlus(Box::new(item), Box::new(separator))
    }

    /// Direct children in order.
    pub fn children(&self) -> Vec<&Expression> {
        use Expression::*;
        match self {
            Epsilon | Empty | Any | ValueStr | ValueInt | Terminal(_) | Nonterminal(_) => vec![],
            Selectable(_, b) | Optional(b) | Star(b) | Plus(b) => vec![b],
            Sequence(xs) | Choice(xs) => xs.iter().collect(),
            SepListStar(a, b) | SepListPlus(a, b) => vec![a, b],
        }
    }

    /// Rebuild this node around new children, normalising through the
    /// constructors. `children` must have the arity of [`Self::children`].
    pub fn with_children(&self, mut children: Vec<Expression>) -> Expression {
        use Expression::*;
        match self {
            Epsilon | Empty | Any | ValueStr | ValueInt | Terminal(_) | Nonterminal(_) => self.clone(),
            Selectable(s, _) => Expression::sel(s.clone(), children.pop().unwrap()),
            Optional(_) => Expression::opt(children.pop().unwrap()),
            Star(_) => Expression::star(children.pop().unwrap()),
            Plus(_) => Expression::plus(children.pop().unwrap()),
            Sequence(_) => Expression::seq(children),
            Choice(_) => Expression::choice(children),
            SepListStar(..) => {
                let sep = children.pop().unwrap();
                Expression::sepstar(children.pop().unwrap(), sep)
            }
            SepListPlus(..) => {
                let sep = children.pop().unwrap();
                Expression::sepplus(children.pop().unwrap(), sep)
            }
        }
    }

    /// Post-order rewrite: children are rewritten first, the node is rebuilt
    /// through the constructors, then `f` is applied to it.
    pub fn map_bottom_up(&self, f: &mut dyn FnMut(Expression) -> Expression) -> Expression {
        let kids: Vec<Expression> = self.children().into_iter().map(|c| c.map_bottom_up(f)).collect();
        f(self.with_children(kids))
    }

    /// Pre-order rewrite: where `f` returns a replacement the subtree is not
    /// descended into.
    pub fn rewrite_top_down(&self, f: &mut dyn FnMut(&Expression) -> Option<Expression>) -> Expression {
        if let Some(r) = f(self) {
            return r;
        }
        let kids: Vec<Expression> = self.children().into_iter().map(|c| c.rewrite_top_down(f)).collect();
        self.with_children(kids)
    }

    /// Pre-order visit of every node.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expression)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn any_node(&self, pred: &dyn Fn(&Expression) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any_node(pred))
    }

    pub fn nonterminals(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expression::Nonterminal(n) = e {
                out.insert(n.clone());
            }
        });
        out
    }

    pub fn terminals(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let Expression::Terminal(t) = e {
                out.insert(t.clone());
            }
        });
        out
    }

    /// Number of `Nonterminal(name)` occurrences.
    pub fn count_nonterminal(&self, name: &str) -> usize {
        let mut k = 0;
        self.walk(&mut |e| {
            if matches!(e, Expression::Nonterminal(n) if n == name) {
                k += 1;
            }
        });
        k
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.any_node(&|e| matches!(e, Expression::Nonterminal(n) if n == name))
    }

    pub fn rename_nonterminal(&self, from: &str, to: &str) -> Expression {
        self.map_bottom_up(&mut |e| match e {
            Expression::Nonterminal(n) if n == from => Expression::Nonterminal(to.to_string()),
            other => other,
        })
    }

    /// Replace every use of `name` with `body`.
    pub fn substitute(&self, name: &str, body: &Expression) -> Expression {
        self.map_bottom_up(&mut |e| match e {
            Expression::Nonterminal(n) if n == name => body.clone(),
            other => other,
        })
    }

    /// A single atomic symbol: nonterminal, value, ε, φ or α.
    pub fn is_atomic_symbol(&self) -> bool {
        use Expression::*;
        matches!(self, Nonterminal(_) | ValueStr | ValueInt | Epsilon | Empty | Any)
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Expression::ValueStr | Expression::ValueInt)
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(|c| c.size()).sum::<usize>()
    }

    fn precedence(&self) -> u8 {
        match self {
            Expression::Choice(_) => 0,
            Expression::Sequence(_) => 1,
            Expression::SepListStar(..) | Expression::SepListPlus(..) | Expression::Selectable(..) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        use Expression::*;
        match self {
            Epsilon => write!(f, "ε"),
            Empty => write!(f, "φ"),
            Any => write!(f, "α"),
            ValueStr => write!(f, "str"),
            ValueInt => write!(f, "int"),
            Terminal(t) => write!(f, "{t:?}"),
            Nonterminal(n) => write!(f, "{n}"),
            Selectable(s, b) => {
                write!(f, "{s}::")?;
                b.fmt_at(f, 3)
            }
            Sequence(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    x.fmt_at(f, 2)?;
                }
                Ok(())
            }
            Choice(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    x.fmt_at(f, 1)?;
                }
                Ok(())
            }
            Optional(b) => {
                b.fmt_at(f, 3)?;
                write!(f, "?")
            }
            Star(b) => {
                b.fmt_at(f, 3)?;
                write!(f, "*")
            }
            Plus(b) => {
                b.fmt_at(f, 3)?;
                write!(f, "+")
            }
            SepListStar(a, s) => {
                write!(f, "{{")?;
                a.fmt_at(f, 3)?;
                write!(f, " ")?;
                s.fmt_at(f, 3)?;
                write!(f, "}}*")
            }
            SepListPlus(a, s) => {
                write!(f, "{{")?;
                a.fmt_at(f, 3)?;
                write!(f, " ")?;
                s.fmt_at(f, 3)?;
                write!(f, "}}+")
            }
        }
    }

    /// Term rendering in the `seq([str, star(Expr)])` style used by reports.
    pub fn to_term(&self) -> String {
        use Expression::*;
        let list = |xs: &[Expression]| xs.iter().map(|x| x.to_term()).collect::<Vec<_>>().join(", ");
        match self {
            Epsilon => "ε".into(),
            Empty => "φ".into(),
            Any => "α".into(),
            ValueStr => "str".into(),
            ValueInt => "int".into(),
            Terminal(t) => format!("{t:?}"),
            Nonterminal(n) => n.clone(),
            Selectable(s, b) => format!("sel({s}, {})", b.to_term()),
            Sequence(xs) => format!("seq([{}])", list(xs)),
            Choice(xs) => format!("choice([{}])", list(xs)),
            Optional(b) => format!("?({})", b.to_term()),
            Star(b) => format!("*({})", b.to_term()),
            Plus(b) => format!("+({})", b.to_term()),
            SepListStar(a, s) => format!("sepstar({}, {})", a.to_term(), s.to_term()),
            SepListPlus(a, s) => format!("sepplus({}, {})", a.to_term(), s.to_term()),
        }
    }
}

/// Compact EBNF-like rendering: juxtaposition for sequences, `|` for
/// choices, postfix `? * +`, `{item sep}*` for separator lists.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
