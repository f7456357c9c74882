//! Text formats: one rule per line for knowledge bases, one ground
//! literal per line for evidence.
//!
//! Rule lines are `<weight> <formula>` where the weight is `HARD` or a
//! float, and formulas use `!`, `^`, `v`, `->` with parentheses. The bare
//! token `v` is always the disjunction operator, so neither variables nor
//! constants may be named `v`. Blank lines and `#` comments are skipped.

use crate::error::{Error, Result};
use crate::knowledge::{
    pred_by_name, EvidenceSet, Formula, FormulaAtom, KnowledgeBase, Rule, RuleWeight, VOCABULARY,
};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Bang,
    Caret,
    OrOp,
    Arrow,
}

fn tokenize(line: usize, input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            ',' => {
                tokens.push(Token::Comma);
                i += 1;
            }
            '!' => {
                tokens.push(Token::Bang);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push(Token::Arrow);
                    i += 2;
                } else {
                    return Err(Error::Parse { line, msg: "expected '->' after '-'".into() });
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &input[start..i];
                if word == "v" {
                    tokens.push(Token::OrOp);
                } else {
                    tokens.push(Token::Ident(word.to_owned()));
                }
            }
            _ => {
                return Err(Error::Parse { line, msg: format!("unexpected character '{c}'") });
            }
        }
    }
    Ok(tokens)
}

struct FormulaParser<'a> {
    line: usize,
    tokens: &'a [Token],
    pos: usize,
    var_names: Vec<String>,
}

impl<'a> FormulaParser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, msg: msg.into() }
    }

    fn parse_implies(&mut self) -> Result<Formula> {
        let lhs = self.parse_or()?;
        if self.peek() == Some(&Token::Arrow) {
            self.pos += 1;
            let rhs = self.parse_implies()?;
            Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula> {
        let mut lhs = self.parse_and()?;
        while self.peek() == Some(&Token::OrOp) {
            self.pos += 1;
            let rhs = self.parse_and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula> {
        let mut lhs = self.parse_unary()?;
        while self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let rhs = self.parse_unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Token::Bang) => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.parse_unary()?)))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.parse_implies()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(self.err("expected ')'")),
                }
            }
            Some(Token::Ident(_)) => self.parse_atom(),
            other => Err(self.err(format!("expected formula, found {other:?}"))),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula> {
        let name = match self.next() {
            Some(Token::Ident(name)) => name.clone(),
            other => return Err(self.err(format!("expected predicate, found {other:?}"))),
        };
        let pred = pred_by_name(&name)
            .ok_or_else(|| self.err(format!("unknown predicate {name}")))?;
        if self.next() != Some(Token::LParen) {
            return Err(self.err(format!("expected '(' after {name}")));
        }
        let mut args = Vec::new();
        loop {
            match self.next() {
                Some(Token::Ident(arg)) => {
                    let arg = arg.clone();
                    let var = match self.var_names.iter().position(|v| *v == arg) {
                        Some(idx) => idx,
                        None => {
                            self.var_names.push(arg);
                            self.var_names.len() - 1
                        }
                    };
                    args.push(var);
                }
                other => return Err(self.err(format!("expected variable, found {other:?}"))),
            }
            match self.next() {
                Some(Token::Comma) => continue,
                Some(Token::RParen) => break,
                other => return Err(self.err(format!("expected ',' or ')', found {other:?}"))),
            }
        }
        if args.len() != VOCABULARY[pred].arity {
            return Err(self.err(format!(
                "{name} takes {} arguments, got {}",
                VOCABULARY[pred].arity,
                args.len()
            )));
        }
        Ok(Formula::Atom(FormulaAtom { pred, args }))
    }
}

pub fn parse_knowledge_base(input: &str) -> Result<KnowledgeBase> {
    let mut rules = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (weight_str, formula_str) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Parse { line: line_no, msg: "expected '<weight> <formula>'".into() })?;
        let weight = if weight_str == "HARD" {
            RuleWeight::Hard
        } else {
            RuleWeight::Soft(weight_str.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("weight must be a float or HARD, got '{weight_str}'"),
            })?)
        };
        let tokens = tokenize(line_no, formula_str)?;
        let mut parser = FormulaParser { line: line_no, tokens: &tokens, pos: 0, var_names: Vec::new() };
        let formula = parser.parse_implies()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse { line: line_no, msg: "trailing tokens after formula".into() });
        }
        rules.push(Rule {
            label: format!("r{}", rules.len() + 1),
            weight,
            formula,
            var_names: parser.var_names,
        });
    }
    Ok(KnowledgeBase::new(rules))
}

const PREC_IMPLIES: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNARY: u8 = 3;

fn write_formula(out: &mut String, f: &Formula, vars: &[String], min_prec: u8) {
    let prec = match f {
        Formula::Implies(..) => PREC_IMPLIES,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        Formula::Not(..) | Formula::Atom(..) => PREC_UNARY,
    };
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match f {
        Formula::Atom(a) => {
            out.push_str(VOCABULARY[a.pred].name);
            out.push('(');
            for (i, v) in a.args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&vars[*v]);
            }
            out.push(')');
        }
        Formula::Not(inner) => {
            out.push('!');
            write_formula(out, inner, vars, PREC_UNARY);
        }
        Formula::And(l, r) => {
            write_formula(out, l, vars, PREC_AND);
            out.push_str(" ^ ");
            write_formula(out, r, vars, PREC_AND + 1);
        }
        Formula::Or(l, r) => {
            write_formula(out, l, vars, PREC_OR);
            out.push_str(" v ");
            write_formula(out, r, vars, PREC_OR + 1);
        }
        Formula::Implies(l, r) => {
            write_formula(out, l, vars, PREC_OR);
            out.push_str(" -> ");
            write_formula(out, r, vars, PREC_IMPLIES);
        }
    }
    if parens {
        out.push(')');
    }
}

pub fn knowledge_base_to_text(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for rule in kb.rules() {
        match rule.weight {
            RuleWeight::Hard => out.push_str("HARD"),
            RuleWeight::Soft(w) => out.push_str(&format!("{w:?}")),
        }
        out.push(' ');
        write_formula(&mut out, &rule.formula, &rule.var_names, PREC_IMPLIES);
        out.push('\n');
    }
    out
}

pub fn parse_evidence(input: &str) -> Result<EvidenceSet> {
    let mut ev = EvidenceSet::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (value, atom_str) = match line.strip_prefix('!') {
            Some(rest) => (false, rest.trim()),
            None => (true, line),
        };
        let (name, rest) = atom_str
            .split_once('(')
            .ok_or_else(|| Error::Parse { line: line_no, msg: "expected pred(args)".into() })?;
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse { line: line_no, msg: "missing ')'".into() })?;
        let args: Vec<&str> = inner.split(',').map(str::trim).collect();
        if args.iter().any(|a| a.is_empty() || !is_identifier(a)) {
            return Err(Error::Parse { line: line_no, msg: format!("bad constants in '{line}'") });
        }
        ev.assert_atom(name.trim(), &args, value)
            .map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
    }
    Ok(ev)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn evidence_to_text(ev: &EvidenceSet) -> String {
    let mut out = String::new();
    for (pred, args, value) in ev.iter() {
        if !value {
            out.push('!');
        }
        out.push_str(&crate::knowledge::format_ground_atom(pred, args));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge::default_knowledge_base;

    #[test]
    fn default_kb_round_trips_through_text() {
        let kb = default_knowledge_base();
        let text = kb.to_text();
        let back = KnowledgeBase::parse(&text).unwrap();
        assert_eq!(back.rules().len(), kb.rules().len());
        for (a, b) in kb.rules().iter().zip(back.rules()) {
            assert_eq!(a.formula, b.formula, "{}", a.label);
            match (a.weight, b.weight) {
                (RuleWeight::Hard, RuleWeight::Hard) => {}
                (RuleWeight::Soft(x), RuleWeight::Soft(y)) => {
                    assert_eq!(x, y, "{} weight must round-trip exactly", a.label)
                }
                _ => panic!("weight kind changed for {}", a.label),
            }
        }
    }

    #[test]
    fn parses_rule_with_parens_and_negation() {
        let kb = KnowledgeBase::parse("0.5 !(stable(o1) ^ hover(o1)) -> false(o1) v hidden(o1)\n")
            .unwrap();
        assert_eq!(kb.rules().len(), 1);
        let printed = kb.to_text();
        let back = KnowledgeBase::parse(&printed).unwrap();
        assert_eq!(back.rules()[0].formula, kb.rules()[0].formula);
    }

    #[test]
    fn rejects_unknown_predicate_with_line_number() {
        let err = KnowledgeBase::parse("# comment\nHARD levitates(o1)\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_weight() {
        assert!(KnowledgeBase::parse("soft stable(o1)\n").is_err());
    }

    #[test]
    fn rejects_arity_mismatch() {
        assert!(KnowledgeBase::parse("HARD contact(o1)\n").is_err());
    }

    #[test]
    fn evidence_round_trips_with_negation() {
        let text = "stable(O3)\n!hover(O1)\ncontact(O1,table)\n";
        let ev = EvidenceSet::parse(text).unwrap();
        let rendered = ev.to_text();
        let back = EvidenceSet::parse(&rendered).unwrap();
        assert_eq!(back, ev);
        assert_eq!(ev.constants(), ["O3", "O1", "table"]);
    }

    #[test]
    fn evidence_parse_reports_line() {
        let err = EvidenceSet::parse("stable(O1)\nwobbles(O1)\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
