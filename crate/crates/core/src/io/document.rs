//! Sectioned plain-text model documents.
//!
//! ```text
//! # comment
//! [bridge]
//! span = 16000
//! top_flange = 180 12
//! [damage case a]
//! footprint = 7000 1800 9000 3600; 9000 1800 10000 2700
//! ```
//!
//! Values are numbers, words or whitespace-separated lists; rectangles in a
//! footprint are separated by `;`. Repeated keys are allowed only where a
//! section takes a list of items (`layer`, `patch`).

use std::cell::Cell;
use std::fmt::Write as _;

use crate::capacity::CapacitySpec;
use crate::damage::{DelaminationScenario, InterfaceKind};
use crate::error::{Error, Location, Result};
use crate::materials::{ConcreteParams, SteelParams};
use crate::model::{
    hs20_side_by_side, BridgeConfig, GirderPlates, LoadPatch, MeshDensity, RebarDirection, RebarSpec, Rect,
    SlabConfig, SlabSupport, SymmetryPlane,
};
use crate::solver::SolverSettings;

#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Bridge(BridgeConfig),
    Slab(SlabConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadLayout {
    /// Two side-by-side HS-20 trucks on the given wheel lines.
    Hs20([f64; 4]),
    Patches(Vec<LoadPatch>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadSpec {
    /// Target total load, kN.
    pub total: f64,
    pub layout: LoadLayout,
}

impl LoadSpec {
    pub fn patches(&self, span: f64) -> Vec<LoadPatch> {
        match &self.layout {
            LoadLayout::Hs20(lines) => hs20_side_by_side(span, *lines),
            LoadLayout::Patches(p) => p.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub structure: Structure,
    pub symmetry: Vec<SymmetryPlane>,
    pub loads: LoadSpec,
    pub scenarios: Vec<DelaminationScenario>,
    pub solver: SolverSettings,
    pub capacity: Option<CapacitySpec>,
    /// Stop bridge pushovers at the nominal punching limit.
    pub stop_at_punching: bool,
}

impl ModelDocument {
    pub fn span(&self) -> f64 {
        match &self.structure {
            Structure::Bridge(b) => b.span,
            Structure::Slab(s) => s.span,
        }
    }

    pub fn patches(&self) -> Vec<LoadPatch> {
        self.loads.patches(self.span())
    }

    pub fn scenario(&self, label: &str) -> Result<&DelaminationScenario> {
        self.scenarios
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| Error::InvalidInput(format!("no damage scenario labelled '{label}'")))
    }
}

struct Entry {
    key: String,
    value: String,
    key_at: Location,
    value_at: Location,
    used: Cell<bool>,
}

struct Section {
    name: String,
    arg: Option<String>,
    at: Location,
    entries: Vec<Entry>,
}

fn doc_err(at: Location, message: impl Into<String>) -> Error {
    Error::Document { location: at, message: message.into() }
}

#[derive(Clone, Copy)]
enum Rule {
    Positive,
    NonNegative,
    Any,
}

impl Section {
    fn title(&self) -> String {
        match &self.arg {
            Some(a) => format!("[{} {a}]", self.name),
            None => format!("[{}]", self.name),
        }
    }

    fn one(&self, key: &str) -> Result<Option<&Entry>> {
        let mut hits = self.entries.iter().filter(|e| e.key == key);
        let first = hits.next();
        if let Some(dup) = hits.next() {
            return Err(doc_err(dup.key_at, format!("duplicate key '{key}' in {}", self.title())));
        }
        if let Some(e) = first {
            e.used.set(true);
        }
        Ok(first)
    }

    fn all(&self, key: &str) -> Vec<&Entry> {
        let v: Vec<&Entry> = self.entries.iter().filter(|e| e.key == key).collect();
        v.iter().for_each(|e| e.used.set(true));
        v
    }

    fn required<'a>(&self, key: &str, e: Option<&'a Entry>) -> Result<&'a Entry> {
        e.ok_or_else(|| doc_err(self.at, format!("{} is missing required key '{key}'", self.title())))
    }

    fn num_opt(&self, key: &str, rule: Rule) -> Result<Option<f64>> {
        self.one(key)?.map(|e| number(e, &e.value, rule)).transpose()
    }

    fn num(&self, key: &str, rule: Rule) -> Result<f64> {
        let e = self.required(key, self.one(key)?)?;
        number(e, &e.value, rule)
    }

    fn nums(&self, key: &str, n: usize, rule: Rule) -> Result<Vec<f64>> {
        let e = self.required(key, self.one(key)?)?;
        numbers(e, &e.value, Some(n), rule)
    }

    fn count(&self, key: &str, min: usize) -> Result<usize> {
        let e = self.required(key, self.one(key)?)?;
        let v: usize = e
            .value
            .parse()
            .map_err(|_| doc_err(e.value_at, format!("'{key}' must be a whole number (got '{}')", e.value)))?;
        if v < min {
            return Err(doc_err(e.value_at, format!("'{key}' must be >= {min} (got {v})")));
        }
        Ok(v)
    }

    fn count_opt(&self, key: &str, min: usize) -> Result<Option<usize>> {
        if self.entries.iter().any(|e| e.key == key) {
            self.count(key, min).map(Some)
        } else {
            Ok(None)
        }
    }

    fn word_opt<'a>(&self, key: &str, options: &[&'a str]) -> Result<Option<&'a str>> {
        let Some(e) = self.one(key)? else { return Ok(None) };
        options
            .iter()
            .find(|o| **o == e.value)
            .copied()
            .map(Some)
            .ok_or_else(|| doc_err(e.value_at, format!("'{key}' must be one of {} (got '{}')", options.join(", "), e.value)))
    }

    fn finish(&self) -> Result<()> {
        match self.entries.iter().find(|e| !e.used.get()) {
            Some(e) => Err(doc_err(e.key_at, format!("unknown key '{}' in {}", e.key, self.title()))),
            None => Ok(()),
        }
    }

    /// Maps a validation failure of the whole block to the block header.
    fn check(&self, r: Result<()>) -> Result<()> {
        r.map_err(|e| doc_err(self.at, format!("{}: {e}", self.title())))
    }
}

fn number(e: &Entry, text: &str, rule: Rule) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| doc_err(e.value_at, format!("'{}' expects a number (got '{}')", e.key, text.trim())))?;
    let ok = v.is_finite()
        && match rule {
            Rule::Positive => v > 0.0,
            Rule::NonNegative => v >= 0.0,
            Rule::Any => true,
        };
    if !ok {
        let need = match rule {
            Rule::Positive => "> 0",
            Rule::NonNegative => ">= 0",
            Rule::Any => "finite",
        };
        return Err(doc_err(e.value_at, format!("'{}' must be {need} (got {v})", e.key)));
    }
    Ok(v)
}

fn numbers(e: &Entry, text: &str, n: Option<usize>, rule: Rule) -> Result<Vec<f64>> {
    let v = text.split_whitespace().map(|t| number(e, t, rule)).collect::<Result<Vec<_>>>()?;
    if let Some(n) = n {
        if v.len() != n {
            return Err(doc_err(e.value_at, format!("'{}' expects {n} numbers (got {})", e.key, v.len())));
        }
    }
    Ok(v)
}

fn lex(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let at = Location { line, column: indent + 1 };
        if let Some(rest) = trimmed.strip_prefix('[') {
            let inner = rest
                .strip_suffix(']')
                .ok_or_else(|| doc_err(at, "section header is missing ']'"))?
                .trim();
            let mut parts = inner.splitn(2, char::is_whitespace);
            let name = parts.next().unwrap_or("").to_string();
            if name.is_empty() {
                return Err(doc_err(at, "empty section header"));
            }
            let arg = parts.next().map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
            sections.push(Section { name, arg, at, entries: Vec::new() });
            continue;
        }
        let eq = content
            .find('=')
            .ok_or_else(|| doc_err(at, format!("expected 'key = value' (got '{trimmed}')")))?;
        let key = content[..eq].trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(doc_err(at, format!("invalid key '{key}'")));
        }
        let after = &content[eq + 1..];
        let value = after.trim();
        let value_col = eq + 2 + (after.len() - after.trim_start().len());
        let section = sections.last_mut().ok_or_else(|| doc_err(at, "key outside of any section"))?;
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            key_at: at,
            value_at: Location { line, column: value_col },
            used: Cell::new(false),
        });
    }
    Ok(sections)
}

fn parse_concrete(s: &Section) -> Result<ConcreteParams> {
    let e = s.num("e", Rule::Positive)?;
    let ft = s.num("ft", Rule::Positive)?;
    let p = ConcreteParams {
        e,
        nu: s.num("nu", Rule::NonNegative)?,
        fc: s.num("fc", Rule::Positive)?,
        ft,
        ecu: s.num("ecu", Rule::Positive)?,
        etu: s.num_opt("etu", Rule::Positive)?.unwrap_or(crate::materials::DEFAULT_SOFTENING_RATIO * ft / e),
        beta_shear: s.num_opt("shear_retention", Rule::NonNegative)?.unwrap_or(crate::materials::DEFAULT_SHEAR_RETENTION),
    };
    s.finish()?;
    s.check(p.validate())?;
    Ok(p)
}

fn parse_steel(s: &Section) -> Result<SteelParams> {
    let p = SteelParams { e: s.num("e", Rule::Positive)?, fy: s.num("fy", Rule::Positive)?, h: s.num("h", Rule::NonNegative)? };
    s.finish()?;
    s.check(p.validate())?;
    Ok(p)
}

fn parse_symmetry(s: &Section) -> Result<Vec<SymmetryPlane>> {
    let Some(e) = s.one("symmetry")? else { return Ok(Vec::new()) };
    let mut planes = Vec::new();
    for w in e.value.split_whitespace() {
        let p = match w {
            "x-mid" => SymmetryPlane::XMid,
            "y-mid" => SymmetryPlane::YMid,
            "none" => continue,
            other => {
                return Err(doc_err(e.value_at, format!("unknown symmetry plane '{other}' (x-mid, y-mid or none)")));
            }
        };
        if planes.contains(&p) {
            return Err(doc_err(e.value_at, format!("symmetry plane '{w}' listed twice")));
        }
        planes.push(p);
    }
    Ok(planes)
}

fn parse_reinforcement(s: &Section) -> Result<Vec<RebarSpec>> {
    let mut out = Vec::new();
    for e in s.all("layer") {
        let parts: Vec<&str> = e.value.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(doc_err(e.value_at, "'layer' expects: depth area longitudinal|transverse"));
        }
        let direction = match parts[2] {
            "longitudinal" => RebarDirection::Longitudinal,
            "transverse" => RebarDirection::Transverse,
            other => return Err(doc_err(e.value_at, format!("unknown bar direction '{other}'"))),
        };
        out.push(RebarSpec {
            depth: number(e, parts[0], Rule::Positive)?,
            area: number(e, parts[1], Rule::Positive)?,
            direction,
        });
    }
    s.finish()?;
    Ok(out)
}

fn parse_loads(s: &Section) -> Result<LoadSpec> {
    let total = s.num("total", Rule::Positive)?;
    let hs20 = s.one("hs20")?;
    let patches = s.all("patch");
    let layout = match (hs20, patches.is_empty()) {
        (Some(e), true) => {
            let v = numbers(e, &e.value, Some(4), Rule::NonNegative)?;
            LoadLayout::Hs20([v[0], v[1], v[2], v[3]])
        }
        (None, false) => {
            let mut out = Vec::new();
            for e in patches {
                let v = numbers(e, &e.value, Some(5), Rule::Any)?;
                if !(v[2] > 0.0 && v[3] > 0.0 && v[4] >= 0.0) {
                    return Err(doc_err(e.value_at, "patch size must be > 0 and share >= 0"));
                }
                out.push(LoadPatch { center: [v[0], v[1]], length: v[2], width: v[3], share: v[4] });
            }
            let sum: f64 = out.iter().map(|p| p.share).sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(doc_err(s.at, format!("patch shares sum to {sum}, not 1")));
            }
            LoadLayout::Patches(out)
        }
        (Some(e), false) => return Err(doc_err(e.key_at, "use either 'hs20' or 'patch' entries, not both")),
        (None, true) => return Err(doc_err(s.at, "[loads] needs an 'hs20' layout or 'patch' entries")),
    };
    s.finish()?;
    Ok(LoadSpec { total, layout })
}

fn parse_damage(s: &Section) -> Result<DelaminationScenario> {
    let label = s.arg.clone().ok_or_else(|| doc_err(s.at, "damage sections need a label: [damage <label>]"))?;
    let fe = s.required("footprint", s.one("footprint")?)?;
    let mut footprint = Vec::new();
    for part in fe.value.split(';').map(str::trim).filter(|p| !p.is_empty() && *p != "none") {
        let v = numbers(fe, part, Some(4), Rule::Any)?;
        footprint.push(Rect::new(v[0], v[1], v[2], v[3]));
    }
    let interface = match s.word_opt("interface", &["compression-only", "bonded"])? {
        Some("bonded") => InterfaceKind::Bonded,
        _ => InterfaceKind::CompressionOnly,
    };
    let d = DelaminationScenario {
        label,
        footprint,
        depth: s.num("depth", Rule::Positive)?,
        crack_width: s.num("crack_width", Rule::NonNegative)?,
        gap: s.num_opt("gap", Rule::NonNegative)?,
        interface,
        penalty_scale: s.num_opt("penalty_scale", Rule::Positive)?.unwrap_or(crate::damage::DEFAULT_PENALTY_SCALE),
    };
    s.finish()?;
    Ok(d)
}

fn parse_solver(s: &Section) -> Result<SolverSettings> {
    let d = SolverSettings::default();
    let out = SolverSettings {
        initial_step: s.num_opt("initial_step", Rule::Positive)?.unwrap_or(d.initial_step),
        tolerance: s.num_opt("tolerance", Rule::Positive)?.unwrap_or(d.tolerance),
        max_iterations: s.count_opt("max_iterations", 1)?.unwrap_or(d.max_iterations),
        min_step: s.num_opt("min_step", Rule::Positive)?.unwrap_or(d.min_step),
        max_steps: s.count_opt("max_steps", 1)?.unwrap_or(d.max_steps),
        verbose: false,
    };
    s.finish()?;
    s.check(out.validate())?;
    Ok(out)
}

fn parse_capacity(s: &Section) -> Result<(CapacitySpec, bool)> {
    let spec = CapacitySpec {
        shear_depth: s.num("shear_depth", Rule::Positive)?,
        strip_area: s.num("strip_area", Rule::Positive)?,
        strip_depth: s.num("strip_depth", Rule::Positive)?,
        effective_width: s.num_opt("effective_width", Rule::Positive)?,
    };
    let stop = !matches!(s.word_opt("stop_at_punching", &["true", "false"])?, Some("false"));
    s.finish()?;
    Ok((spec, stop))
}

/// Parses and validates a model document.
pub fn parse_model_document(text: &str) -> Result<ModelDocument> {
    let sections = lex(text)?;
    let structure_at;
    let mut bridge = None;
    let mut slab = None;
    let mut concrete = None;
    let mut girder_steel = None;
    let mut rebar_steel = None;
    let mut reinforcement = None;
    let mut loads = None;
    let mut scenarios: Vec<DelaminationScenario> = Vec::new();
    let mut solver = None;
    let mut capacity = None;
    let symmetry;

    fn once<'a>(slot: &mut Option<&'a Section>, s: &'a Section) -> Result<()> {
        if slot.is_some() {
            return Err(doc_err(s.at, format!("duplicate section {}", s.title())));
        }
        *slot = Some(s);
        Ok(())
    }

    for s in &sections {
        match (s.name.as_str(), s.arg.as_deref()) {
            ("bridge", None) => once(&mut bridge, s)?,
            ("slab", None) => once(&mut slab, s)?,
            ("concrete", None) => once(&mut concrete, s)?,
            ("steel", Some("girder")) => once(&mut girder_steel, s)?,
            ("steel", Some("rebar")) => once(&mut rebar_steel, s)?,
            ("reinforcement", None) => once(&mut reinforcement, s)?,
            ("loads", None) => once(&mut loads, s)?,
            ("solver", None) => once(&mut solver, s)?,
            ("capacity", None) => once(&mut capacity, s)?,
            ("damage", _) => {
                let d = parse_damage(s)?;
                if scenarios.iter().any(|o| o.label == d.label) {
                    return Err(doc_err(s.at, format!("duplicate damage label '{}'", d.label)));
                }
                scenarios.push(d);
            }
            _ => return Err(doc_err(s.at, format!("unknown section {}", s.title()))),
        }
    }
    let first = sections.first().map(|s| s.at).unwrap_or(Location { line: 1, column: 1 });
    fn need<'a>(slot: Option<&'a Section>, name: &str, first: Location) -> Result<&'a Section> {
        slot.ok_or_else(|| doc_err(first, format!("missing section [{name}]")))
    }

    let concrete_p = parse_concrete(need(concrete, "concrete", first)?)?;
    let rebar_p = parse_steel(need(rebar_steel, "steel rebar", first)?)?;
    let bars = reinforcement.map(parse_reinforcement).transpose()?.unwrap_or_default();
    let structure = match (bridge, slab) {
        (Some(b), None) => {
            structure_at = b.at;
            let girder = parse_steel(need(girder_steel, "steel girder", first)?)?;
            let pair = |key: &str| -> Result<(f64, f64)> {
                let v = b.nums(key, 2, Rule::Positive)?;
                Ok((v[0], v[1]))
            };
            let diaphragms = match b.one("diaphragms")? {
                Some(e) => numbers(e, &e.value, None, Rule::Positive)?,
                None => Vec::new(),
            };
            let cfg = BridgeConfig {
                span: b.num("span", Rule::Positive)?,
                girders: b.count("girders", 2)?,
                spacing: b.num("spacing", Rule::Positive)?,
                deck_thickness: b.num("deck_thickness", Rule::Positive)?,
                overhang: b.num("overhang", Rule::NonNegative)?,
                haunch: b.num("haunch", Rule::NonNegative)?,
                girder: GirderPlates {
                    top_flange: pair("top_flange")?,
                    web: pair("web")?,
                    bottom_flange: pair("bottom_flange")?,
                },
                diaphragms,
                diaphragm_plate: pair("diaphragm_plate")?,
                mesh: MeshDensity {
                    per_bay: b.count("per_bay", 4)?,
                    per_span: b.count("per_span", 10)?,
                    layers: b.count("layers", 4)?,
                },
                concrete: concrete_p,
                girder_steel: girder,
                rebar_steel: rebar_p,
                reinforcement: bars,
            };
            symmetry = parse_symmetry(b)?;
            b.finish()?;
            b.check(cfg.validate())?;
            Structure::Bridge(cfg)
        }
        (None, Some(s)) => {
            structure_at = s.at;
            if let Some(g) = girder_steel {
                return Err(doc_err(g.at, "[steel girder] is only valid for bridges"));
            }
            let support = match s.word_opt("support", &["two-edges", "four-edges"])? {
                Some("two-edges") => SlabSupport::TwoEdges,
                Some(_) => SlabSupport::FourEdges,
                None => return Err(doc_err(s.at, "[slab] is missing required key 'support'")),
            };
            let cfg = SlabConfig {
                span: s.num("span", Rule::Positive)?,
                width: s.num("width", Rule::Positive)?,
                thickness: s.num("thickness", Rule::Positive)?,
                support,
                elements_x: s.count("elements_x", 2)?,
                elements_y: s.count("elements_y", 2)?,
                layers: s.count("layers", 4)?,
                concrete: concrete_p,
                rebar_steel: rebar_p,
                reinforcement: bars,
            };
            symmetry = parse_symmetry(s)?;
            s.finish()?;
            s.check(cfg.validate())?;
            Structure::Slab(cfg)
        }
        (Some(_), Some(s)) => return Err(doc_err(s.at, "a document describes either a [bridge] or a [slab]")),
        (None, None) => return Err(doc_err(first, "missing [bridge] or [slab] section")),
    };
    let loads = parse_loads(need(loads, "loads", first)?)?;
    let solver = solver.map(parse_solver).transpose()?.unwrap_or_default();
    let (capacity, stop_at_punching) = match capacity {
        Some(c) => {
            if matches!(structure, Structure::Slab(_)) {
                return Err(doc_err(c.at, "[capacity] is only valid for bridges"));
            }
            let (spec, stop) = parse_capacity(c)?;
            (Some(spec), stop)
        }
        None => (None, false),
    };
    let doc = ModelDocument { structure, symmetry, loads, scenarios, solver, capacity, stop_at_punching };
    let at = structure_at;
    let (thickness, plan) = match &doc.structure {
        Structure::Bridge(b) => (b.deck_thickness, Rect::new(0.0, 0.0, b.span, b.deck_width())),
        Structure::Slab(s) => (s.thickness, Rect::new(0.0, 0.0, s.span, s.width)),
    };
    for d in &doc.scenarios {
        let where_ = sections
            .iter()
            .find(|s| s.name == "damage" && s.arg.as_deref() == Some(d.label.as_str()))
            .map(|s| s.at)
            .unwrap_or(at);
        d.validate(thickness, &plan).map_err(|e| doc_err(where_, e.to_string()))?;
    }
    Ok(doc)
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Canonical text of a document. Every default is written out, so
/// `parse(serialize(d)) == d` and serializing a parsed canonical document
/// reproduces it byte for byte.
pub fn serialize_model_document(doc: &ModelDocument) -> String {
    let mut out = String::new();
    let w = &mut out;
    let symmetry = || {
        if doc.symmetry.is_empty() {
            "none".to_string()
        } else {
            doc.symmetry
                .iter()
                .map(|p| match p {
                    SymmetryPlane::XMid => "x-mid",
                    SymmetryPlane::YMid => "y-mid",
                })
                .collect::<Vec<_>>()
                .join(" ")
        }
    };
    let (concrete, rebar, bars) = match &doc.structure {
        Structure::Bridge(b) => {
            let _ = writeln!(w, "[bridge]");
            let _ = writeln!(w, "span = {}", b.span);
            let _ = writeln!(w, "girders = {}", b.girders);
            let _ = writeln!(w, "spacing = {}", b.spacing);
            let _ = writeln!(w, "deck_thickness = {}", b.deck_thickness);
            let _ = writeln!(w, "overhang = {}", b.overhang);
            let _ = writeln!(w, "haunch = {}", b.haunch);
            let _ = writeln!(w, "top_flange = {} {}", b.girder.top_flange.0, b.girder.top_flange.1);
            let _ = writeln!(w, "web = {} {}", b.girder.web.0, b.girder.web.1);
            let _ = writeln!(w, "bottom_flange = {} {}", b.girder.bottom_flange.0, b.girder.bottom_flange.1);
            let _ = writeln!(w, "diaphragms = {}", list(&b.diaphragms));
            let _ = writeln!(w, "diaphragm_plate = {} {}", b.diaphragm_plate.0, b.diaphragm_plate.1);
            let _ = writeln!(w, "per_bay = {}", b.mesh.per_bay);
            let _ = writeln!(w, "per_span = {}", b.mesh.per_span);
            let _ = writeln!(w, "layers = {}", b.mesh.layers);
            let _ = writeln!(w, "symmetry = {}", symmetry());
            (b.concrete, b.rebar_steel, &b.reinforcement)
        }
        Structure::Slab(s) => {
            let _ = writeln!(w, "[slab]");
            let _ = writeln!(w, "span = {}", s.span);
            let _ = writeln!(w, "width = {}", s.width);
            let _ = writeln!(w, "thickness = {}", s.thickness);
            let support = match s.support {
                SlabSupport::TwoEdges => "two-edges",
                SlabSupport::FourEdges => "four-edges",
            };
            let _ = writeln!(w, "support = {support}");
            let _ = writeln!(w, "elements_x = {}", s.elements_x);
            let _ = writeln!(w, "elements_y = {}", s.elements_y);
            let _ = writeln!(w, "layers = {}", s.layers);
            let _ = writeln!(w, "symmetry = {}", symmetry());
            (s.concrete, s.rebar_steel, &s.reinforcement)
        }
    };
    let _ = writeln!(w, "\n[concrete]");
    let _ = writeln!(w, "e = {}", concrete.e);
    let _ = writeln!(w, "nu = {}", concrete.nu);
    let _ = writeln!(w, "fc = {}", concrete.fc);
    let _ = writeln!(w, "ft = {}", concrete.ft);
    let _ = writeln!(w, "ecu = {}", concrete.ecu);
    let _ = writeln!(w, "etu = {}", concrete.etu);
    let _ = writeln!(w, "shear_retention = {}", concrete.beta_shear);
    let steel = |w: &mut String, name: &str, p: &SteelParams| {
        let _ = writeln!(w, "\n[steel {name}]");
        let _ = writeln!(w, "e = {}", p.e);
        let _ = writeln!(w, "fy = {}", p.fy);
        let _ = writeln!(w, "h = {}", p.h);
    };
    if let Structure::Bridge(b) = &doc.structure {
        steel(w, "girder", &b.girder_steel);
    }
    steel(w, "rebar", &rebar);
    let _ = writeln!(w, "\n[reinforcement]");
    for r in bars {
        let dir = match r.direction {
            RebarDirection::Longitudinal => "longitudinal",
            RebarDirection::Transverse => "transverse",
        };
        let _ = writeln!(w, "layer = {} {} {dir}", r.depth, r.area);
    }
    let _ = writeln!(w, "\n[loads]");
    let _ = writeln!(w, "total = {}", doc.loads.total);
    match &doc.loads.layout {
        LoadLayout::Hs20(l) => {
            let _ = writeln!(w, "hs20 = {}", list(l));
        }
        LoadLayout::Patches(ps) => {
            for p in ps {
                let _ = writeln!(w, "patch = {}", list(&[p.center[0], p.center[1], p.length, p.width, p.share]));
            }
        }
    }
    for d in &doc.scenarios {
        let _ = writeln!(w, "\n[damage {}]", d.label);
        let rects: Vec<String> = d.footprint.iter().map(|r| list(&[r.x0, r.y0, r.x1, r.y1])).collect();
        let _ = writeln!(w, "footprint = {}", if rects.is_empty() { "none".to_string() } else { rects.join("; ") });
        let _ = writeln!(w, "depth = {}", d.depth);
        let _ = writeln!(w, "crack_width = {}", d.crack_width);
        if let Some(g) = d.gap {
            let _ = writeln!(w, "gap = {g}");
        }
        let interface = match d.interface {
            InterfaceKind::CompressionOnly => "compression-only",
            InterfaceKind::Bonded => "bonded",
        };
        let _ = writeln!(w, "interface = {interface}");
        let _ = writeln!(w, "penalty_scale = {}", d.penalty_scale);
    }
    let s = &doc.solver;
    let _ = writeln!(w, "\n[solver]");
    let _ = writeln!(w, "initial_step = {}", s.initial_step);
    let _ = writeln!(w, "tolerance = {}", s.tolerance);
    let _ = writeln!(w, "max_iterations = {}", s.max_iterations);
    let _ = writeln!(w, "min_step = {}", s.min_step);
    let _ = writeln!(w, "max_steps = {}", s.max_steps);
    if let Some(c) = &doc.capacity {
        let _ = writeln!(w, "\n[capacity]");
        let _ = writeln!(w, "shear_depth = {}", c.shear_depth);
        let _ = writeln!(w, "strip_area = {}", c.strip_area);
        let _ = writeln!(w, "strip_depth = {}", c.strip_depth);
        if let Some(e) = c.effective_width {
            let _ = writeln!(w, "effective_width = {e}");
        }
        let _ = writeln!(w, "stop_at_punching = {}", doc.stop_at_punching);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SLAB: &str = "\
[slab]
span = 2000
width = 2000
thickness = 100
support = four-edges
elements_x = 4
elements_y = 4
layers = 6

[concrete]
e = 30000
nu = 0.2
fc = 30
ft = 3
ecu = 0.0035

[steel rebar]
e = 200000
fy = 420
h = 2000

[loads]
total = 100
patch = 1000 1000 200 200 1
";

    #[test]
    fn minimal_slab_round_trips() {
        let d = parse_model_document(SLAB).unwrap();
        let text = serialize_model_document(&d);
        let again = parse_model_document(&text).unwrap();
        assert_eq!(d, again);
        assert_eq!(serialize_model_document(&again), text);
        // defaults are echoed
        assert!(text.contains("etu = 0.001"));
        assert!(text.contains("[solver]"));
    }

    #[test]
    fn negative_thickness_cites_line() {
        let bad = SLAB.replace("thickness = 100", "thickness = -1");
        match parse_model_document(&bad) {
            Err(Error::Document { location, message }) => {
                assert_eq!(location.line, 4);
                assert_eq!(location.column, 13);
                assert!(message.contains("> 0"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_and_section_rejected() {
        let bad = SLAB.replace("layers = 6", "layers = 6\ncolour = red");
        match parse_model_document(&bad) {
            Err(Error::Document { location, message }) => {
                assert_eq!(location.line, 9);
                assert!(message.contains("colour"));
            }
            other => panic!("{other:?}"),
        }
        let bad = format!("{SLAB}\n[extras]\n");
        assert!(matches!(parse_model_document(&bad), Err(Error::Document { .. })));
    }

    #[test]
    fn syntax_errors_have_locations() {
        let bad = SLAB.replace("span = 2000", "span 2000");
        match parse_model_document(&bad) {
            Err(Error::Document { location, .. }) => assert_eq!(location.line, 2),
            other => panic!("{other:?}"),
        }
        let bad = SLAB.replace("span = 2000", "span = abc");
        assert!(matches!(parse_model_document(&bad), Err(Error::Document { .. })));
    }

    #[test]
    fn damage_blocks() {
        let text = format!(
            "{SLAB}\n[damage a]\nfootprint = 500 500 1000 1000; 1000 500 1500 1000\ndepth = 40\ncrack_width = 0\ngap = 0\ninterface = bonded\n"
        );
        let d = parse_model_document(&text).unwrap();
        assert_eq!(d.scenarios.len(), 1);
        assert_eq!(d.scenarios[0].footprint.len(), 2);
        assert_eq!(d.scenarios[0].interface, InterfaceKind::Bonded);
        assert_eq!(parse_model_document(&serialize_model_document(&d)).unwrap(), d);
        let deep = text.replace("depth = 40", "depth = 150");
        assert!(parse_model_document(&deep).is_err());
    }
}
