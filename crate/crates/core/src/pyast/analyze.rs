use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::Range;

use rustpython_parser::ast::{self, Expr, Stmt};

use super::lexical::{canonical_code, find_open_paren, LineIndex};
use super::{parse_suite, span, CallKind, CallSite, DataflowGraph, SyntaxError};

/// Call sites (by index) whose results may flow into a value.
type Producers = BTreeSet<usize>;

/// Line layout of one statement and its nested blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StmtOutline {
    /// Byte span of the statement, including decorators.
    pub span: Range<usize>,
    /// Inclusive 1-based first and last line.
    pub lines: (usize, usize),
    /// Nested statement blocks (bodies, `else` arms, handlers...).
    pub blocks: Vec<Vec<StmtOutline>>,
}

/// Per top-level statement summary used by dead-code elimination.
#[derive(Debug, Clone, Default)]
pub(crate) struct TopLevelFacts {
    /// Names bound at module scope by the statement.
    pub defs: BTreeSet<String>,
    /// Names that the statement definitely rebinds.
    pub kills: BTreeSet<String>,
    /// Names read anywhere inside the statement.
    pub uses: BTreeSet<String>,
    pub has_library_call: bool,
    /// Calls a function or class defined earlier in the snippet.
    pub calls_local_fn: bool,
    pub print: Option<PrintCall>,
}

/// A top-level `print(...)` expression statement.
#[derive(Debug, Clone)]
pub(crate) struct PrintCall {
    /// Text of the positional arguments when the call has only plain
    /// positional arguments.
    pub plain_args: Option<String>,
}

/// Everything the static passes need to know about one snippet.
#[derive(Debug, Clone)]
pub struct ProgramFacts {
    /// Library call sites in evaluation order.
    pub calls: Vec<CallSite>,
    pub dataflow: DataflowGraph,
    /// Top-level statements.
    pub outline: Vec<StmtOutline>,
    pub(crate) top_level: Vec<TopLevelFacts>,
    pub(crate) lines: LineIndex,
}

impl ProgramFacts {
    pub fn analyze<P: AsRef<str>>(source: &str, library_prefixes: &[P]) -> Result<Self, SyntaxError> {
        let suite = parse_suite(source)?;
        let lines = LineIndex::new(source);
        let mut analyzer = Analyzer {
            src: source,
            lines: &lines,
            prefixes: library_prefixes.iter().map(|p| p.as_ref().to_owned()).collect(),
            scope: Scope::default(),
            local_fns: HashSet::new(),
            calls: Vec::new(),
            edges: BTreeSet::new(),
            top_level: Vec::with_capacity(suite.len()),
            depth: 0,
        };
        for stmt in &suite {
            analyzer.top_level.push(TopLevelFacts::default());
            analyzer.top_level_stmt(stmt);
        }
        let outline = suite.iter().map(|s| outline_of(source, &lines, s)).collect();
        let Analyzer { calls, edges, top_level, .. } = analyzer;
        let dataflow = DataflowGraph::new(calls.len(), edges);
        Ok(Self { calls, dataflow, outline, top_level, lines })
    }

    pub fn line_index(&self) -> &LineIndex {
        &self.lines
    }

    /// Indices of the sites that call `qualified_name` directly.
    pub fn target_sites(&self, qualified_name: &str) -> Vec<usize> {
        (0..self.calls.len()).filter(|&i| self.calls[i].is_call_to(qualified_name)).collect()
    }

    /// Chain of statements (outermost first) whose span contains `offset`.
    pub fn enclosing_statements(&self, offset: usize) -> Vec<(&[StmtOutline], usize)> {
        let mut chain = Vec::new();
        let mut block: &[StmtOutline] = &self.outline;
        'descend: loop {
            for (i, stmt) in block.iter().enumerate() {
                if stmt.span.start <= offset && offset < stmt.span.end {
                    chain.push((block, i));
                    for inner in &stmt.blocks {
                        if inner.iter().any(|s| s.span.start <= offset && offset < s.span.end) {
                            block = inner;
                            continue 'descend;
                        }
                    }
                    break 'descend;
                }
            }
            break;
        }
        chain
    }
}

#[derive(Debug, Clone, Default)]
struct Scope {
    env: HashMap<String, Producers>,
    /// Local name -> dotted library path, from imports.
    aliases: HashMap<String, String>,
    /// Library prefixes rebound to something else.
    shadowed: HashSet<String>,
}

struct Analyzer<'a> {
    src: &'a str,
    lines: &'a LineIndex,
    prefixes: Vec<String>,
    scope: Scope,
    local_fns: HashSet<String>,
    calls: Vec<CallSite>,
    edges: BTreeSet<(usize, usize)>,
    top_level: Vec<TopLevelFacts>,
    /// Nesting depth of function/class/lambda/comprehension scopes.
    depth: usize,
}

impl Analyzer<'_> {
    fn facts(&mut self) -> &mut TopLevelFacts {
        self.top_level.last_mut().expect("statement facts pushed before walking")
    }

    fn top_level_stmt(&mut self, stmt: &Stmt) {
        match stmt {
            Stmt::Assign(a) => {
                for t in &a.targets {
                    if let Expr::Name(n) = t {
                        self.facts().kills.insert(n.id.to_string());
                    }
                }
            }
            Stmt::AnnAssign(a) if a.value.is_some() => {
                if let Expr::Name(n) = a.target.as_ref() {
                    self.facts().kills.insert(n.id.to_string());
                }
            }
            Stmt::Import(i) => {
                for alias in &i.names {
                    let local = import_local_name(alias);
                    self.facts().kills.insert(local);
                }
            }
            Stmt::ImportFrom(i) => {
                for alias in &i.names {
                    let local = alias.asname.as_ref().unwrap_or(&alias.name).to_string();
                    self.facts().kills.insert(local);
                }
            }
            Stmt::FunctionDef(f) => {
                self.facts().kills.insert(f.name.to_string());
            }
            Stmt::AsyncFunctionDef(f) => {
                self.facts().kills.insert(f.name.to_string());
            }
            Stmt::ClassDef(c) => {
                self.facts().kills.insert(c.name.to_string());
            }
            Stmt::Expr(e) => {
                if let Expr::Call(call) = e.value.as_ref() {
                    if matches!(call.func.as_ref(), Expr::Name(n) if n.id.as_str() == "print") {
                        let plain = call.keywords.is_empty()
                            && !call.args.is_empty()
                            && call.args.iter().all(|a| !matches!(a, Expr::Starred(_) | Expr::GeneratorExp(_)));
                        let plain_args = plain.then(|| {
                            let start = span(&call.args[0]).start;
                            let end = span(call.args.last().expect("non-empty")).end;
                            self.src[start..end].to_owned()
                        });
                        self.facts().print = Some(PrintCall { plain_args });
                    }
                }
            }
            _ => {}
        }
        self.stmt(stmt);
    }

    fn block(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match stmt {
            Stmt::FunctionDef(f) => {
                self.function(&f.decorator_list, &f.args, f.returns.as_deref(), &f.body);
                self.bind_name(f.name.as_str(), Producers::new());
                self.local_fns.insert(f.name.to_string());
            }
            Stmt::AsyncFunctionDef(f) => {
                self.function(&f.decorator_list, &f.args, f.returns.as_deref(), &f.body);
                self.bind_name(f.name.as_str(), Producers::new());
                self.local_fns.insert(f.name.to_string());
            }
            Stmt::ClassDef(c) => {
                for d in &c.decorator_list {
                    self.expr(d);
                }
                for b in &c.bases {
                    self.expr(b);
                }
                for k in &c.keywords {
                    self.expr(&k.value);
                }
                self.scoped(|this| this.block(&c.body));
                self.bind_name(c.name.as_str(), Producers::new());
                self.local_fns.insert(c.name.to_string());
            }
            Stmt::Return(r) => {
                if let Some(v) = &r.value {
                    self.expr(v);
                }
            }
            Stmt::Delete(d) => {
                for t in &d.targets {
                    match t {
                        Expr::Name(n) => {
                            self.use_name(n.id.as_str());
                            self.scope.env.remove(n.id.as_str());
                        }
                        other => {
                            self.expr(other);
                        }
                    }
                }
            }
            Stmt::Assign(a) => {
                let value = self.expr(&a.value);
                for t in &a.targets {
                    self.bind(t, &value);
                }
            }
            Stmt::TypeAlias(t) => {
                self.expr(&t.value);
            }
            Stmt::AugAssign(a) => {
                let mut value = self.expr(&a.value);
                value.extend(self.expr(&a.target));
                self.bind(&a.target, &value);
            }
            Stmt::AnnAssign(a) => {
                if let Some(v) = &a.value {
                    let value = self.expr(v);
                    self.bind(&a.target, &value);
                }
            }
            Stmt::For(f) => self.for_loop(&f.target, &f.iter, &f.body, &f.orelse),
            Stmt::AsyncFor(f) => self.for_loop(&f.target, &f.iter, &f.body, &f.orelse),
            Stmt::While(w) => {
                self.expr(&w.test);
                self.block(&w.body);
                self.block(&w.orelse);
            }
            Stmt::If(i) => {
                self.expr(&i.test);
                self.block(&i.body);
                self.block(&i.orelse);
            }
            Stmt::With(w) => self.with(&w.items, &w.body),
            Stmt::AsyncWith(w) => self.with(&w.items, &w.body),
            Stmt::Match(m) => {
                self.expr(&m.subject);
                for case in &m.cases {
                    if let Some(g) = &case.guard {
                        self.expr(g);
                    }
                    self.block(&case.body);
                }
            }
            Stmt::Raise(r) => {
                if let Some(e) = &r.exc {
                    self.expr(e);
                }
                if let Some(c) = &r.cause {
                    self.expr(c);
                }
            }
            Stmt::Try(t) => self.try_stmt(&t.body, &t.handlers, &t.orelse, &t.finalbody),
            Stmt::TryStar(t) => self.try_stmt(&t.body, &t.handlers, &t.orelse, &t.finalbody),
            Stmt::Assert(a) => {
                self.expr(&a.test);
                if let Some(m) = &a.msg {
                    self.expr(m);
                }
            }
            Stmt::Import(i) => {
                for alias in &i.names {
                    let local = import_local_name(alias);
                    let path = if alias.asname.is_some() { alias.name.to_string() } else { local.clone() };
                    self.bind_import(local, path);
                }
            }
            Stmt::ImportFrom(i) => {
                let module = i.module.as_ref().map(|m| m.to_string()).unwrap_or_default();
                for alias in &i.names {
                    if alias.name.as_str() == "*" {
                        continue;
                    }
                    let local = alias.asname.as_ref().unwrap_or(&alias.name).to_string();
                    let path = format!("{module}.{}", alias.name);
                    self.bind_import(local, path);
                }
            }
            Stmt::Global(_) | Stmt::Nonlocal(_) | Stmt::Pass(_) | Stmt::Break(_) | Stmt::Continue(_) => {}
            Stmt::Expr(e) => {
                self.expr(&e.value);
            }
        }
    }

    fn function(&mut self, decorators: &[Expr], args: &ast::Arguments, returns: Option<&Expr>, body: &[Stmt]) {
        for d in decorators {
            self.expr(d);
        }
        self.defaults(args);
        if let Some(r) = returns {
            self.expr(r);
        }
        self.scoped(|this| {
            this.bind_params(args);
            this.block(body);
        });
    }

    fn defaults(&mut self, args: &ast::Arguments) {
        for a in args.posonlyargs.iter().chain(&args.args).chain(&args.kwonlyargs) {
            if let Some(d) = &a.default {
                self.expr(d);
            }
        }
    }

    fn bind_params(&mut self, args: &ast::Arguments) {
        let names = args
            .posonlyargs
            .iter()
            .chain(&args.args)
            .chain(&args.kwonlyargs)
            .map(|a| a.def.arg.to_string())
            .chain(args.vararg.iter().map(|a| a.arg.to_string()))
            .chain(args.kwarg.iter().map(|a| a.arg.to_string()));
        for name in names.collect::<Vec<_>>() {
            self.bind_name(&name, Producers::new());
        }
    }

    fn for_loop(&mut self, target: &Expr, iter: &Expr, body: &[Stmt], orelse: &[Stmt]) {
        let items = self.expr(iter);
        self.bind(target, &items);
        self.block(body);
        self.block(orelse);
    }

    fn with(&mut self, items: &[ast::WithItem], body: &[Stmt]) {
        for item in items {
            let value = self.expr(&item.context_expr);
            if let Some(v) = &item.optional_vars {
                self.bind(v, &value);
            }
        }
        self.block(body);
    }

    fn try_stmt(&mut self, body: &[Stmt], handlers: &[ast::ExceptHandler], orelse: &[Stmt], finalbody: &[Stmt]) {
        self.block(body);
        for h in handlers {
            let ast::ExceptHandler::ExceptHandler(h) = h;
            if let Some(t) = &h.type_ {
                self.expr(t);
            }
            if let Some(n) = &h.name {
                self.bind_name(n.as_str(), Producers::new());
            }
            self.block(&h.body);
        }
        self.block(orelse);
        self.block(finalbody);
    }

    /// Runs `f` in a nested scope whose bindings are discarded afterwards.
    fn scoped(&mut self, f: impl FnOnce(&mut Self)) {
        let saved = self.scope.clone();
        self.depth += 1;
        f(self);
        self.depth -= 1;
        self.scope = saved;
    }

    fn use_name(&mut self, name: &str) {
        if !self.top_level.is_empty() {
            self.facts().uses.insert(name.to_owned());
        }
    }

    fn bind_name(&mut self, name: &str, value: Producers) {
        if self.depth == 0 {
            self.facts().defs.insert(name.to_owned());
        }
        self.scope.aliases.remove(name);
        if self.prefixes.iter().any(|p| p == name) {
            self.scope.shadowed.insert(name.to_owned());
        }
        self.scope.env.insert(name.to_owned(), value);
    }

    fn bind_import(&mut self, local: String, path: String) {
        if self.depth == 0 {
            self.facts().defs.insert(local.clone());
        }
        self.scope.env.remove(&local);
        self.scope.shadowed.remove(&local);
        let root = path.split('.').next().unwrap_or_default();
        if self.prefixes.iter().any(|p| p == &local) {
            self.scope.aliases.remove(&local);
        } else if self.prefixes.iter().any(|p| p == root) {
            self.scope.aliases.insert(local, path);
        } else {
            self.scope.aliases.remove(&local);
        }
    }

    fn bind(&mut self, target: &Expr, value: &Producers) {
        match target {
            Expr::Name(n) => self.bind_name(n.id.as_str(), value.clone()),
            // Unpacking is not tracked element-wise: every element is killed.
            Expr::Tuple(t) => {
                for e in &t.elts {
                    self.bind(e, &Producers::new());
                }
            }
            Expr::List(l) => {
                for e in &l.elts {
                    self.bind(e, &Producers::new());
                }
            }
            Expr::Starred(s) => self.bind(&s.value, &Producers::new()),
            // Storing into a container or attribute is a weak update of the base.
            Expr::Subscript(s) => {
                self.expr(&s.slice);
                self.weak_update(&s.value, value);
            }
            Expr::Attribute(a) => self.weak_update(&a.value, value),
            other => {
                self.expr(other);
            }
        }
    }

    fn weak_update(&mut self, base: &Expr, value: &Producers) {
        match base {
            Expr::Name(n) => {
                self.use_name(n.id.as_str());
                self.scope.env.entry(n.id.to_string()).or_default().extend(value.iter().copied());
            }
            other => {
                self.expr(other);
            }
        }
    }

    fn library_path(&self, name: &str) -> Option<String> {
        if self.scope.shadowed.contains(name) || self.scope.env.contains_key(name) {
            return None;
        }
        if let Some(path) = self.scope.aliases.get(name) {
            return Some(path.clone());
        }
        self.prefixes.iter().any(|p| p == name).then(|| name.to_owned())
    }

    fn exprs<'e>(&mut self, items: impl IntoIterator<Item = &'e Expr>) -> Producers {
        let mut out = Producers::new();
        for e in items {
            out.extend(self.expr(e));
        }
        out
    }

    fn expr(&mut self, expr: &Expr) -> Producers {
        match expr {
            Expr::Call(c) => self.call(c),
            Expr::Name(n) => {
                self.use_name(n.id.as_str());
                self.scope.env.get(n.id.as_str()).cloned().unwrap_or_default()
            }
            Expr::BoolOp(b) => self.exprs(&b.values),
            Expr::NamedExpr(n) => {
                let value = self.expr(&n.value);
                self.bind(&n.target, &value);
                value
            }
            Expr::BinOp(b) => {
                let mut out = self.expr(&b.left);
                out.extend(self.expr(&b.right));
                out
            }
            Expr::UnaryOp(u) => self.expr(&u.operand),
            Expr::Lambda(l) => {
                self.defaults(&l.args);
                self.scoped(|this| {
                    this.bind_params(&l.args);
                    this.expr(&l.body);
                });
                Producers::new()
            }
            Expr::IfExp(i) => {
                let mut out = self.expr(&i.test);
                out.extend(self.expr(&i.body));
                out.extend(self.expr(&i.orelse));
                out
            }
            Expr::Dict(d) => {
                let mut out = Producers::new();
                for (k, v) in d.keys.iter().zip(&d.values) {
                    if let Some(k) = k {
                        out.extend(self.expr(k));
                    }
                    out.extend(self.expr(v));
                }
                out
            }
            Expr::Set(s) => self.exprs(&s.elts),
            Expr::ListComp(c) => self.comprehension(&c.generators, |this| this.expr(&c.elt)),
            Expr::SetComp(c) => self.comprehension(&c.generators, |this| this.expr(&c.elt)),
            Expr::GeneratorExp(c) => self.comprehension(&c.generators, |this| this.expr(&c.elt)),
            Expr::DictComp(c) => self.comprehension(&c.generators, |this| {
                let mut out = this.expr(&c.key);
                out.extend(this.expr(&c.value));
                out
            }),
            Expr::Await(a) => self.expr(&a.value),
            Expr::Yield(y) => y.value.as_ref().map(|v| self.expr(v)).unwrap_or_default(),
            Expr::YieldFrom(y) => self.expr(&y.value),
            Expr::Compare(c) => {
                let mut out = self.expr(&c.left);
                out.extend(self.exprs(&c.comparators));
                out
            }
            Expr::FormattedValue(f) => {
                let mut out = self.expr(&f.value);
                if let Some(spec) = &f.format_spec {
                    out.extend(self.expr(spec));
                }
                out
            }
            Expr::JoinedStr(j) => self.exprs(&j.values),
            Expr::Constant(_) => Producers::new(),
            Expr::Attribute(a) => self.expr(&a.value),
            Expr::Subscript(s) => {
                let mut out = self.expr(&s.value);
                out.extend(self.expr(&s.slice));
                out
            }
            Expr::Starred(s) => self.expr(&s.value),
            Expr::List(l) => self.exprs(&l.elts),
            Expr::Tuple(t) => self.exprs(&t.elts),
            Expr::Slice(s) => {
                let mut out = Producers::new();
                for part in [&s.lower, &s.upper, &s.step].into_iter().flatten() {
                    out.extend(self.expr(part));
                }
                out
            }
        }
    }

    fn comprehension(&mut self, generators: &[ast::Comprehension], elt: impl FnOnce(&mut Self) -> Producers) -> Producers {
        let mut out = Producers::new();
        self.scoped(|this| {
            for g in generators {
                let items = this.expr(&g.iter);
                this.bind(&g.target, &items);
                for cond in &g.ifs {
                    this.expr(cond);
                }
            }
            out = elt(this);
        });
        out
    }

    fn call(&mut self, call: &ast::ExprCall) -> Producers {
        let func = call.func.as_ref();
        let mut inputs = Producers::new();
        let mut library: Option<(String, CallKind, Range<usize>)> = None;

        if let Some((root, rest)) = dotted_name(func) {
            if !rest.is_empty() {
                if let Some(path) = self.library_path(root.id.as_str()) {
                    self.use_name(root.id.as_str());
                    let api = format!("{path}.{}", rest.join("."));
                    let func_span = span(func);
                    let after_root = span(root).end;
                    let dot = after_root + self.src[after_root..func_span.end].find('.').unwrap_or(0);
                    let name_start = dot + 1 + (self.src[dot + 1..].len() - self.src[dot + 1..].trim_start().len());
                    library = Some((api, CallKind::Direct, name_start..func_span.end));
                }
            }
        }
        if library.is_none() {
            match func {
                Expr::Attribute(a) => {
                    let receiver = self.expr(&a.value);
                    if let Some(&first) = receiver.iter().next() {
                        let root = self.calls[first].api.split('.').next().unwrap_or_default().to_owned();
                        let end = span(func).end;
                        let name_span = end - a.attr.as_str().len()..end;
                        library = Some((format!("{root}.·{}", a.attr), CallKind::Method, name_span));
                    }
                    inputs.extend(receiver);
                }
                Expr::Name(n) => {
                    if self.local_fns.contains(n.id.as_str()) {
                        self.facts().calls_local_fn = true;
                    }
                    inputs.extend(self.expr(func));
                }
                other => inputs.extend(self.expr(other)),
            }
        }

        for a in &call.args {
            inputs.extend(self.expr(a));
        }
        for k in &call.keywords {
            inputs.extend(self.expr(&k.value));
        }

        let Some((api, kind, name_span)) = library else {
            return inputs;
        };
        let call_span = span(call);
        let func_end = span(func).end;
        let open = find_open_paren(self.src, func_end, call_span.end).unwrap_or(func_end);
        let arg_span = open + 1..call_span.end - 1;
        let id = self.calls.len();
        self.calls.push(CallSite {
            callee: self.src[span(func)].to_owned(),
            api,
            kind,
            normalized_args: canonical_code(&self.src[arg_span.clone()]),
            arg_span,
            line_range: (self.lines.line_of(call_span.start), self.lines.line_of(call_span.end.saturating_sub(1))),
            call_span,
            name_span,
        });
        self.edges.extend(inputs.into_iter().map(|p| (p, id)));
        self.facts().has_library_call = true;
        Producers::from([id])
    }
}

fn import_local_name(alias: &ast::Alias) -> String {
    match &alias.asname {
        Some(a) => a.to_string(),
        None => alias.name.split('.').next().unwrap_or_default().to_owned(),
    }
}

/// Splits `a.b.c` into the root name node and the trailing attribute names.
fn dotted_name(expr: &Expr) -> Option<(&ast::ExprName, Vec<&str>)> {
    match expr {
        Expr::Name(n) => Some((n, Vec::new())),
        Expr::Attribute(a) => {
            let (root, mut rest) = dotted_name(&a.value)?;
            rest.push(a.attr.as_str());
            Some((root, rest))
        }
        _ => None,
    }
}

fn decorated_start(src: &str, stmt_start: usize, decorators: &[Expr]) -> usize {
    decorators
        .iter()
        .map(|d| {
            let before = src[..span(d).start].trim_end();
            if before.ends_with('@') {
                before.len() - 1
            } else {
                span(d).start
            }
        })
        .min()
        .map_or(stmt_start, |s| s.min(stmt_start))
}

pub(crate) fn outline_of(src: &str, lines: &LineIndex, stmt: &Stmt) -> StmtOutline {
    let mut range = span(stmt);
    let outline = |body: &[Stmt]| -> Vec<StmtOutline> { body.iter().map(|s| outline_of(src, lines, s)).collect() };
    let blocks = match stmt {
        Stmt::FunctionDef(f) => {
            range.start = decorated_start(src, range.start, &f.decorator_list);
            vec![outline(&f.body)]
        }
        Stmt::AsyncFunctionDef(f) => {
            range.start = decorated_start(src, range.start, &f.decorator_list);
            vec![outline(&f.body)]
        }
        Stmt::ClassDef(c) => {
            range.start = decorated_start(src, range.start, &c.decorator_list);
            vec![outline(&c.body)]
        }
        Stmt::For(f) => vec![outline(&f.body), outline(&f.orelse)],
        Stmt::AsyncFor(f) => vec![outline(&f.body), outline(&f.orelse)],
        Stmt::While(w) => vec![outline(&w.body), outline(&w.orelse)],
        Stmt::If(i) => vec![outline(&i.body), outline(&i.orelse)],
        Stmt::With(w) => vec![outline(&w.body)],
        Stmt::AsyncWith(w) => vec![outline(&w.body)],
        Stmt::Match(m) => m.cases.iter().map(|c| outline(&c.body)).collect(),
        Stmt::Try(t) => try_blocks(&outline, &t.body, &t.handlers, &t.orelse, &t.finalbody),
        Stmt::TryStar(t) => try_blocks(&outline, &t.body, &t.handlers, &t.orelse, &t.finalbody),
        _ => Vec::new(),
    };
    let last = lines.line_of(range.end.saturating_sub(1).max(range.start));
    StmtOutline { lines: (lines.line_of(range.start), last), span: range, blocks }
}

fn try_blocks(
    outline: &impl Fn(&[Stmt]) -> Vec<StmtOutline>,
    body: &[Stmt],
    handlers: &[ast::ExceptHandler],
    orelse: &[Stmt],
    finalbody: &[Stmt],
) -> Vec<Vec<StmtOutline>> {
    let mut blocks = vec![outline(body)];
    for h in handlers {
        let ast::ExceptHandler::ExceptHandler(h) = h;
        blocks.push(outline(&h.body));
    }
    blocks.push(outline(orelse));
    blocks.push(outline(finalbody));
    blocks
}
