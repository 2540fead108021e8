//! Deterministic stress-program generator.
//!
//! Emits IR source exercising all three patterns at a requested scale:
//! container blocks (allocate a list, add an element, iterate it back out
//! through a cast), field-wrapper blocks (store a value through a chain of
//! `depth` nested init calls and load it back), and local-flow blocks (a
//! two-way select between freshly allocated values).
//!
//! With two or more containers the program additionally builds a shared
//! `pool` variable holding every container element and feeds it through
//! per-container `Mixer` objects whose methods chain long copy sequences
//! through two levels of helper calls.  Object-sensitive analyses re-analyse
//! those chains once per mixer allocation site, while the flow-insensitive
//! analyses — and the cut-shortcut policy, which cuts the mixer stores,
//! loads and helper returns — handle them once.  That asymmetry is the
//! scaling lever for the generated benchmark.
//!
//! Generation is a pure function of the spec: identical specs give
//! identical bytes. The seed only shuffles the interleaving of blocks.

use std::fmt::Write;

/// The bundled container library source (prepended to generated programs).
pub const CONTAINER_LIBRARY: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/stdlib/containers.ir"));

/// The container model matching [`CONTAINER_LIBRARY`].
pub const CONTAINER_MODEL: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/stdlib/std.json"));

/// Length of the copy chains inside the mixer/helper methods.
const CHAIN: usize = 32;

/// Parameters of a generated program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StressSpec {
    pub seed: u64,
    pub n_containers: u32,
    pub n_field_wrappers: u32,
    pub n_local_flows: u32,
    /// Levels of nested init calls in each field-wrapper block.
    pub depth: u32,
}

impl Default for StressSpec {
    fn default() -> Self {
        StressSpec { seed: 1, n_containers: 1, n_field_wrappers: 0, n_local_flows: 0, depth: 2 }
    }
}

/// Splitmix-style generator: platform-independent and reproducible.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let x = self.0;
        let x = (x ^ (x >> 33)).wrapping_mul(0xff51afd7ed558ccd);
        x ^ (x >> 33)
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

#[derive(Clone, Copy)]
enum Block {
    Container(u32),
    Wrapper(u32),
    LocalFlow(u32),
}

const ELEM_CLASSES: [&str; 3] = ["GItemA", "GItemB", "GItemC"];

/// Generate the IR source for `spec`.
pub fn generate(spec: &StressSpec) -> String {
    let mut rng = Rng(spec.seed ^ 0x9e3779b97f4a7c15);
    let depth = spec.depth.max(1);

    // Shuffle the block interleaving (Fisher–Yates driven by the seed).
    let mut blocks: Vec<Block> = Vec::new();
    for i in 0..spec.n_containers {
        blocks.push(Block::Container(i));
    }
    for i in 0..spec.n_field_wrappers {
        blocks.push(Block::Wrapper(i));
    }
    for i in 0..spec.n_local_flows {
        blocks.push(Block::LocalFlow(i));
    }
    for i in (1..blocks.len()).rev() {
        blocks.swap(i, rng.below(i + 1));
    }
    // Element classes per container block, fixed after the shuffle so the
    // choice only depends on the seed and the block index order.
    let elem_of: Vec<&str> =
        (0..blocks.len()).map(|_| ELEM_CLASSES[rng.below(ELEM_CLASSES.len())]).collect();

    let mixers = spec.n_containers >= 2;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "// generated stress program: seed={} containers={} wrappers={} localFlows={} depth={}",
        spec.seed, spec.n_containers, spec.n_field_wrappers, spec.n_local_flows, depth
    );
    out.push('\n');
    out.push_str(CONTAINER_LIBRARY);
    out.push('\n');

    out.push_str("class GItem extends Object {\n}\n\n");
    for c in ELEM_CLASSES {
        let _ = writeln!(out, "class {c} extends GItem {{\n}}\n");
    }

    if spec.n_field_wrappers > 0 {
        out.push_str("class Carton {\n  field load: GItem;\n\n");
        out.push_str("  method init0(this, v: GItem) {\n    this.load = v;\n  }\n");
        for k in 1..=depth {
            let _ = write!(
                out,
                "\n  method init{k}(this, v: GItem) {{\n    this.init{}(v);\n  }}\n",
                k - 1
            );
        }
        out.push_str(
            "\n  method unwrap(this): GItem {\n    local v: GItem;\n    v = this.load;\n    return v;\n  }\n}\n\n",
        );
    }

    if spec.n_local_flows > 0 {
        out.push_str("class Chooser {\n");
        out.push_str("  method select(this, a: GItem, b: GItem): GItem {\n");
        out.push_str("    local t: GItem;\n");
        out.push_str("    if * goto Right;\n");
        out.push_str("    t = a;\n");
        out.push_str("    goto Done;\n");
        out.push_str("    Right: t = b;\n");
        out.push_str("    Done: return t;\n");
        out.push_str("  }\n}\n\n");
    }

    if mixers {
        out.push_str("class Mixer {\n  field slot: Object;\n\n");
        out.push_str("  method mix(this, v: Object): Object {\n");
        for i in 0..CHAIN {
            let _ = writeln!(out, "    local a{i}: Object;");
        }
        out.push_str("    local h: Helper;\n    local hr: Object;\n    local w: Object;\n");
        out.push_str("    a0 = v;\n");
        for i in 1..CHAIN {
            let _ = writeln!(out, "    a{i} = a{};", i - 1);
        }
        out.push_str("    h = new Helper @gHelp;\n");
        let _ = writeln!(out, "    hr = h.churn(a{});", CHAIN - 1);
        out.push_str("    this.slot = v;\n    w = this.slot;\n    return w;\n  }\n}\n\n");

        out.push_str("class Helper {\n");
        out.push_str("  method churn(this, v: Object): Object {\n");
        for i in 0..CHAIN {
            let _ = writeln!(out, "    local b{i}: Object;");
        }
        out.push_str("    local w: Object;\n");
        out.push_str("    b0 = v;\n");
        for i in 1..CHAIN {
            let _ = writeln!(out, "    b{i} = b{};", i - 1);
        }
        let _ = writeln!(out, "    w = this.fold(b{});", CHAIN - 1);
        out.push_str("    return w;\n  }\n\n");
        out.push_str("  method fold(this, v: Object): Object {\n");
        for i in 0..CHAIN {
            let _ = writeln!(out, "    local c{i}: Object;");
        }
        out.push_str("    c0 = v;\n");
        for i in 1..CHAIN {
            let _ = writeln!(out, "    c{i} = c{};", i - 1);
        }
        let _ = writeln!(out, "    return c{};", CHAIN - 1);
        out.push_str("  }\n}\n\n");
    }

    out.push_str("class Main {\n  method main() {\n");

    // Locals, in block order.
    for (bi, block) in blocks.iter().enumerate() {
        match *block {
            Block::Container(i) => {
                let e = elem_of[bi];
                let _ = writeln!(out, "    local c{i}_l: List;");
                let _ = writeln!(out, "    local c{i}_e: {e};");
                let _ = writeln!(out, "    local c{i}_g: Object;");
                let _ = writeln!(out, "    local c{i}_it: ListIterator;");
                let _ = writeln!(out, "    local c{i}_r: Object;");
                let _ = writeln!(out, "    local c{i}_c: {e};");
            }
            Block::Wrapper(i) => {
                let _ = writeln!(out, "    local f{i}_box: Carton;");
                let _ = writeln!(out, "    local f{i}_v: GItem;");
                let _ = writeln!(out, "    local f{i}_r: GItem;");
            }
            Block::LocalFlow(i) => {
                let _ = writeln!(out, "    local s{i}_ch: Chooser;");
                let _ = writeln!(out, "    local s{i}_a: GItem;");
                let _ = writeln!(out, "    local s{i}_b: GItem;");
                let _ = writeln!(out, "    local s{i}_r: GItem;");
            }
        }
    }
    if mixers {
        out.push_str("    local pool: Object;\n");
        for i in 0..spec.n_containers {
            let _ = writeln!(out, "    local m{i}_x: Mixer;");
            let _ = writeln!(out, "    local m{i}_r: Object;");
        }
    }

    // Statements, in block order.
    for (bi, block) in blocks.iter().enumerate() {
        match *block {
            Block::Container(i) => {
                let e = elem_of[bi];
                let _ = writeln!(out, "    c{i}_l = new List @gc{i}L;");
                let _ = writeln!(out, "    c{i}_e = new {e} @gc{i}E;");
                let _ = writeln!(out, "    c{i}_l.add(c{i}_e);");
                let _ = writeln!(out, "    c{i}_g = c{i}_l.get();");
                let _ = writeln!(out, "    c{i}_it = c{i}_l.iterator();");
                let _ = writeln!(out, "    c{i}_r = c{i}_it.next();");
                let _ = writeln!(out, "    c{i}_c = ({e}) c{i}_r;");
            }
            Block::Wrapper(i) => {
                let _ = writeln!(out, "    f{i}_box = new Carton @gf{i}B;");
                let _ = writeln!(out, "    f{i}_v = new GItem @gf{i}V;");
                let _ = writeln!(out, "    f{i}_box.init{depth}(f{i}_v);");
                let _ = writeln!(out, "    f{i}_r = f{i}_box.unwrap();");
            }
            Block::LocalFlow(i) => {
                let _ = writeln!(out, "    s{i}_ch = new Chooser @gs{i}C;");
                let _ = writeln!(out, "    s{i}_a = new GItem @gs{i}A;");
                let _ = writeln!(out, "    s{i}_b = new GItem @gs{i}B;");
                let _ = writeln!(out, "    s{i}_r = s{i}_ch.select(s{i}_a, s{i}_b);");
            }
        }
    }
    if mixers {
        for i in 0..spec.n_containers {
            let _ = writeln!(out, "    pool = c{i}_e;");
        }
        for i in 0..spec.n_containers {
            let _ = writeln!(out, "    m{i}_x = new Mixer @gm{i};");
            let _ = writeln!(out, "    m{i}_r = m{i}_x.mix(pool);");
        }
    }

    out.push_str("  }\n}\n");
    out
}
