use std::collections::BTreeMap;

use super::{DiagramDef, DslError, Workspace};
use crate::diagram::{DiagramError, Wire, WiringDiagram};
use crate::types::{Face, Loc, PortRef, Signature, TypeLabel};
use crate::variants::{validate, OperadVariant};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Sym(&'static str),
    Eof,
}

impl Tok {
    fn show(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMS: [&str; 11] = ["->", "--", ":", ",", "(", ")", "{", "}", "[", "]", "."];

fn lex(text: &str) -> Result<Vec<Spanned>, DslError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: ln + 1,
                    col,
                });
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| DslError::Syntax {
                    line: ln + 1,
                    col,
                    found: format!("`{s}`"),
                    expected: vec!["a smaller integer".into()],
                })?;
                out.push(Spanned {
                    tok: Tok::Int(n),
                    line: ln + 1,
                    col,
                });
            } else {
                let rest: String = chars[i..].iter().take(2).collect();
                let sym = SYMS.iter().find(|s| rest.starts_with(**s)).ok_or_else(|| DslError::Syntax {
                    line: ln + 1,
                    col,
                    found: format!("`{c}`"),
                    expected: vec!["a name, number or punctuation".into()],
                })?;
                i += sym.len();
                out.push(Spanned {
                    tok: Tok::Sym(sym),
                    line: ln + 1,
                    col,
                });
            }
        }
    }
    let last = text.lines().count().max(1);
    out.push(Spanned {
        tok: Tok::Eof,
        line: last,
        col: text.lines().last().map_or(1, |l| l.chars().count() + 1),
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    ws: Workspace,
}

enum Stmt {
    Wire(PortRef, PortRef),
    Ground(PortRef),
    Loop(TypeLabel, usize),
    Discard(usize),
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, DslError> {
        let t = self.peek();
        Err(DslError::Syntax {
            line: t.line,
            col: t.col,
            found: t.tok.show(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek().tok, Tok::Sym(x) if x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == k)
    }

    fn sym(&mut self, s: &'static str) -> Result<(), DslError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{s}`")])
        }
    }

    fn kw(&mut self, k: &str) -> Result<(), DslError> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{k}`")])
        }
    }

    fn ident(&mut self, what: &str) -> Result<Spanned, DslError> {
        match self.peek().tok {
            Tok::Ident(_) => Ok(self.bump()),
            _ => self.fail(&[what]),
        }
    }

    fn int(&mut self) -> Result<usize, DslError> {
        match self.peek().tok {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.fail(&["an integer"]),
        }
    }

    fn name(t: &Spanned) -> String {
        match &t.tok {
            Tok::Ident(s) => s.clone(),
            _ => unreachable!(),
        }
    }

    fn type_ref(&mut self) -> Result<TypeLabel, DslError> {
        let t = self.ident("a type name")?;
        let n = Self::name(&t);
        match self.ws.types.get(&n) {
            Some(&d) => Ok(TypeLabel::new(&n, d)),
            None => Err(DslError::UnknownName {
                line: t.line,
                col: t.col,
                kind: "type",
                name: n,
            }),
        }
    }

    /// `()` or a comma-separated list of type names.
    fn types(&mut self) -> Result<Vec<TypeLabel>, DslError> {
        if self.is_sym("(") {
            self.bump();
            self.sym(")")?;
            return Ok(vec![]);
        }
        let mut v = vec![self.type_ref()?];
        while self.is_sym(",") {
            self.bump();
            v.push(self.type_ref()?);
        }
        Ok(v)
    }

    fn check_fresh(&self, t: &Spanned, kind: &'static str, taken: bool) -> Result<(), DslError> {
        if taken {
            Err(DslError::Duplicate {
                line: t.line,
                col: t.col,
                kind,
                name: Self::name(t),
            })
        } else {
            Ok(())
        }
    }

    fn file(&mut self) -> Result<(), DslError> {
        loop {
            if self.peek().tok == Tok::Eof {
                return Ok(());
            } else if self.is_kw("type") {
                self.bump();
                let t = self.ident("a type name")?;
                self.check_fresh(&t, "type", self.ws.types.contains_key(&Self::name(&t)))?;
                self.sym("(")?;
                let d = self.int()?;
                if d == 0 {
                    self.pos -= 1;
                    return self.fail(&["a positive dimension"]);
                }
                self.sym(")")?;
                self.ws.types.insert(Self::name(&t), d);
            } else if self.is_kw("box") {
                self.bump();
                let t = self.ident("a box name")?;
                self.check_fresh(&t, "declaration", self.ws.decls.contains_key(&Self::name(&t)))?;
                self.sym(":")?;
                let ins = self.types()?;
                self.sym("->")?;
                let outs = self.types()?;
                self.ws.decls.insert(Self::name(&t), Signature::boxed(ins, outs));
            } else if self.is_kw("dot") {
                self.bump();
                let t = self.ident("a dot name")?;
                self.check_fresh(&t, "declaration", self.ws.decls.contains_key(&Self::name(&t)))?;
                self.sym(":")?;
                let ports = self.types()?;
                self.ws.decls.insert(Self::name(&t), Signature::dot(ports));
            } else if self.is_kw("diagram") {
                self.diagram()?;
            } else {
                return self.fail(&["`type`", "`box`", "`dot`", "`diagram`"]);
            }
        }
    }

    fn outer_sig(&mut self) -> Result<Signature, DslError> {
        if self.is_kw("empty") {
            self.bump();
            Ok(Signature::Empty)
        } else if self.is_kw("dot") {
            self.bump();
            Ok(Signature::dot(self.types()?))
        } else {
            let ins = self.types()?;
            self.sym("->")?;
            Ok(Signature::boxed(ins, self.types()?))
        }
    }

    fn port_ref(&mut self, slots: &BTreeMap<String, usize>) -> Result<PortRef, DslError> {
        let t = self.ident("`outer` or a slot name")?;
        let n = Self::name(&t);
        let loc = if n == "outer" {
            Loc::Outer
        } else {
            match slots.get(&n) {
                Some(&s) => Loc::Inner(s),
                None => {
                    return Err(DslError::UnknownName {
                        line: t.line,
                        col: t.col,
                        kind: "slot",
                        name: n,
                    })
                }
            }
        };
        self.sym(".")?;
        let face = if self.is_kw("in") {
            Face::In
        } else if self.is_kw("out") {
            Face::Out
        } else if self.is_kw("port") {
            Face::Port
        } else {
            return self.fail(&["`in`", "`out`", "`port`"]);
        };
        self.bump();
        self.sym("[")?;
        let index = self.int()?;
        self.sym("]")?;
        Ok(PortRef::new(loc, face, index))
    }

    fn diagram(&mut self) -> Result<(), DslError> {
        self.kw("diagram")?;
        let t = self.ident("a diagram name")?;
        let name = Self::name(&t);
        self.check_fresh(&t, "diagram", self.ws.diagrams.contains_key(&name))?;
        self.sym("(")?;
        let vt = self.ident("an operad variant")?;
        let variant: OperadVariant = Self::name(&vt).parse().map_err(|_| DslError::Syntax {
            line: vt.line,
            col: vt.col,
            found: vt.tok.show(),
            expected: OperadVariant::ALL.iter().map(|v| format!("`{v}`")).collect(),
        })?;
        self.sym(")")?;
        let outer = if self.is_sym(":") {
            self.bump();
            Some(self.outer_sig()?)
        } else {
            None
        };
        self.sym("{")?;
        self.kw("slots")?;
        self.sym(":")?;
        let mut slot_index = BTreeMap::new();
        let (mut sigs, mut names, mut decls) = (vec![], vec![], vec![]);
        let stmt_kws = ["wire", "ground", "loop", "discard"];
        if !self.is_sym("}") && !stmt_kws.iter().any(|k| self.is_kw(k)) {
            loop {
                let d = self.ident("a declaration name")?;
                let dn = Self::name(&d);
                let sig = self.ws.decls.get(&dn).cloned().ok_or(DslError::UnknownName {
                    line: d.line,
                    col: d.col,
                    kind: "declaration",
                    name: dn.clone(),
                })?;
                self.kw("as")?;
                let s = self.ident("a slot name")?;
                let sn = Self::name(&s);
                self.check_fresh(&s, "slot", slot_index.contains_key(&sn) || sn == "outer")?;
                slot_index.insert(sn.clone(), sigs.len());
                sigs.push(sig);
                names.push(sn);
                decls.push(dn);
                if self.is_sym(",") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        let mut stmts = Vec::new();
        loop {
            if self.is_sym("}") {
                self.bump();
                break;
            } else if self.is_kw("wire") {
                self.bump();
                let a = self.port_ref(&slot_index)?;
                self.sym("--")?;
                let b = self.port_ref(&slot_index)?;
                stmts.push(Stmt::Wire(a, b));
            } else if self.is_kw("ground") {
                self.bump();
                stmts.push(Stmt::Ground(self.port_ref(&slot_index)?));
            } else if self.is_kw("loop") {
                self.bump();
                let l = self.type_ref()?;
                let n = self.int()?;
                stmts.push(Stmt::Loop(l, n));
            } else if self.is_kw("discard") {
                self.bump();
                let s = self.ident("a slot name")?;
                let sn = Self::name(&s);
                let &k = slot_index.get(&sn).ok_or(DslError::UnknownName {
                    line: s.line,
                    col: s.col,
                    kind: "slot",
                    name: sn,
                })?;
                stmts.push(Stmt::Discard(k));
            } else {
                return self.fail(&["`wire`", "`ground`", "`loop`", "`discard`", "`}`"]);
            }
        }
        let outer = match outer {
            Some(o) => o,
            None => infer_outer(&name, variant, &sigs, &stmts)?,
        };
        let mut wires = Vec::new();
        let mut grounds = Vec::new();
        let mut loops = Vec::new();
        let mut discarded = Vec::new();
        for s in stmts {
            match s {
                Stmt::Wire(a, b) => wires.push(Wire::new(a, b)),
                Stmt::Ground(p) => grounds.push(p),
                Stmt::Loop(l, n) => loops.extend(std::iter::repeat_n(l, n)),
                Stmt::Discard(k) => discarded.push(k),
            }
        }
        let invalid = |error: DiagramError| DslError::Invalid {
            diagram: name.clone(),
            error: Box::new(error),
        };
        if wires.len() != wires.iter().collect::<std::collections::BTreeSet<_>>().len() {
            let dup = wires.iter().find(|w| wires.iter().filter(|x| x == w).count() > 1).unwrap();
            return Err(invalid(DiagramError::DoublyUsedPort(dup.ends().0)));
        }
        let diagram = WiringDiagram::new(outer, sigs, wires, grounds, loops, discarded).map_err(invalid)?;
        let report = validate(variant, &diagram);
        if !report.ok() {
            return Err(DslError::VariantViolation {
                diagram: name,
                variant,
                report,
            });
        }
        self.ws.diagrams.insert(
            name,
            DiagramDef {
                variant,
                diagram,
                slot_names: names,
                slot_decls: decls,
            },
        );
        Ok(())
    }
}

fn infer_outer(name: &str, variant: OperadVariant, sigs: &[Signature], stmts: &[Stmt]) -> Result<Signature, DslError> {
    let fail = |detail: String| DslError::OuterInference {
        diagram: name.to_string(),
        detail,
    };
    let mut found: BTreeMap<(Face, usize), Option<TypeLabel>> = BTreeMap::new();
    let label_of = |p: PortRef| -> Option<TypeLabel> {
        match p.loc {
            Loc::Inner(s) => sigs.get(s)?.label_at(p.face, p.index).cloned(),
            Loc::Outer => None,
        }
    };
    let mut note = |p: PortRef, other: Option<PortRef>| {
        if p.loc == Loc::Outer {
            let l = other.and_then(label_of);
            let e = found.entry((p.face, p.index)).or_insert(None);
            if e.is_none() {
                *e = l;
            }
        }
    };
    for s in stmts {
        match *s {
            Stmt::Wire(a, b) => {
                note(a, Some(b));
                note(b, Some(a));
            }
            Stmt::Ground(p) => note(p, None),
            _ => {}
        }
    }
    let list = |face: Face| -> Result<Vec<TypeLabel>, DslError> {
        let n = found.keys().filter(|(f, _)| *f == face).map(|&(_, i)| i + 1).max().unwrap_or(0);
        (0..n)
            .map(|i| match found.get(&(face, i)) {
                Some(Some(l)) => Ok(l.clone()),
                Some(None) => Err(fail(format!("the type of outer.{}[{i}] is not determined by a slot", face.keyword()))),
                None => Err(fail(format!("outer.{}[{i}] is never mentioned", face.keyword()))),
            })
            .collect()
    };
    if variant.uses_dots() {
        if found.keys().any(|(f, _)| *f != Face::Port) {
            return Err(fail("dot diagrams only have outer ports".into()));
        }
        Ok(Signature::dot(list(Face::Port)?))
    } else {
        if found.keys().any(|(f, _)| *f == Face::Port) {
            return Err(fail("box diagrams have no outer ports".into()));
        }
        Ok(Signature::boxed(list(Face::In)?, list(Face::Out)?))
    }
}

/// Parse a whole document.
pub fn parse_dsl(text: &str) -> Result<Workspace, DslError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        ws: Workspace::default(),
    };
    p.file()?;
    Ok(p.ws)
}
