//! Offline construction of the rank table: border patterns, interior
//! patterns, then consecutive ranking down and up from `k0` dots per tile.

pub mod context;
pub mod dotfield;
pub mod init;
pub mod ranking;
pub mod table;
pub mod vars;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::config::{min_spacing_d2, Density};
use crate::error::{Error, Result};
use crate::polyomino::rule::ProductionRule;
use crate::polyomino::tiling::ClassId;
use crate::structure::layout::ClassLayouts;
use crate::structure::production::ClassCatalog;

use context::{find_contexts, Canvas, ClassContext};
pub use init::{init_borders, init_interiors, repair_spacing, BorderPatternTable};
pub use ranking::{DescentRule, Ranker};
pub use table::{ClassRanks, RankTable, SegmentRanks};
use vars::PixelVars;

/// Everything the optimizer derives from the rule and pixel scale.
pub struct Setup {
    pub rule: ProductionRule,
    pub catalog: ClassCatalog,
    pub layouts: ClassLayouts,
    pub vars: PixelVars,
    contexts: Vec<Option<ClassContext>>,
    canvases: Vec<Option<Canvas>>,
}

impl Setup {
    pub fn new(rule: ProductionRule, s: u32) -> Result<Setup> {
        let catalog = ClassCatalog::enumerate(&rule);
        Setup::with_catalog(rule, catalog, s)
    }

    pub fn with_catalog(rule: ProductionRule, catalog: ClassCatalog, s: u32) -> Result<Setup> {
        let layouts = ClassLayouts::build(&catalog, &rule, s)?;
        let contexts = find_contexts(&catalog, &rule)?;
        let canvases = contexts
            .iter()
            .map(|c| c.as_ref().map(|c| Canvas::build(c, &layouts)))
            .collect();
        let vars = PixelVars::build(&layouts);
        Ok(Setup {
            rule,
            catalog,
            layouts,
            vars,
            contexts,
            canvases,
        })
    }

    /// Context of a complete class.
    pub fn context(&self, class: ClassId) -> &ClassContext {
        self.contexts[class as usize]
            .as_ref()
            .expect("complete class")
    }

    pub fn canvas(&self, class: ClassId) -> &Canvas {
        self.canvases[class as usize]
            .as_ref()
            .expect("complete class")
    }

    /// Dot flag per pixel variable from border patterns and interiors.
    pub fn dot_state(&self, borders: &BorderPatternTable, interiors: &[Vec<u16>]) -> Vec<bool> {
        let mut dots = vec![false; self.vars.len()];
        for (sid, p) in borders.patterns.iter().enumerate() {
            for &k in p {
                dots[(self.vars.segment_base[sid] + k as u32) as usize] = true;
            }
        }
        for (c, inner) in interiors.iter().enumerate() {
            for &u in inner {
                dots[self.vars.of_class[c][u as usize] as usize] = true;
            }
        }
        dots
    }

    /// Inverse of [`Setup::dot_state`]: border patterns and interiors of a
    /// per-variable dot state.
    pub fn split_state(&self, dots: &[bool]) -> (Vec<Vec<u16>>, Vec<Vec<u16>>) {
        let patterns = self
            .layouts
            .segments
            .iter()
            .enumerate()
            .map(|(sid, info)| {
                let base = self.vars.segment_base[sid] as usize;
                (0..info.local_pixels.len() as u16)
                    .filter(|&k| dots[base + k as usize])
                    .collect()
            })
            .collect();
        let interiors = self
            .vars
            .of_class
            .iter()
            .map(|of| {
                (0..of.len() as u16)
                    .filter(|&u| {
                        !self.vars.is_border(of[u as usize]) && dots[of[u as usize] as usize]
                    })
                    .collect()
            })
            .collect();
        (patterns, interiors)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub s: u32,
    pub d0: Density,
    pub seed: u64,
    /// Gaussian blur width used for ranking, in pixels.
    pub sigma: f64,
    pub border_sweeps: usize,
    pub lloyd_iterations: usize,
    pub descent: DescentRule,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            s: 8,
            d0: Density::new(1, 8).expect("valid"),
            seed: 1,
            sigma: 1.5,
            border_sweeps: 3,
            lloyd_iterations: 100,
            descent: DescentRule::MaxBlur,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.s < 4 {
            return Err(Error::InvalidArgument(format!(
                "S must be >= 4, got {}",
                self.s
            )));
        }
        if 6 * (self.s as u64).pow(2) > u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!(
                "S = {} is too large",
                self.s
            )));
        }
        if self.sigma.is_nan() || self.sigma <= 0.0 || (3.0 * self.sigma).ceil() > self.s as f64 {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive with 3*sigma <= S, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// Stage timings and diagnostics of a build.
#[derive(Debug, Clone, Default)]
pub struct BuildReport {
    pub classes: usize,
    pub segments: usize,
    pub k0: usize,
    pub border_sweeps: usize,
    pub borders_converged: bool,
    /// Dot moves made by the final spacing repair.
    pub spacing_repairs: usize,
    pub exact_cover_levels: usize,
    /// Levels undone by the ranking after a dead end.
    pub backtracks: usize,
    pub borders_time: Duration,
    pub interiors_time: Duration,
    pub ranking_time: Duration,
}

/// Search reach and pass limit of the spacing repair after initialization.
const REPAIR_REACH: i32 = 64;
const REPAIR_PASSES: usize = 10;

/// Intermediate result of [`initialize`]: the level-`k0` dot patterns.
pub struct Initial {
    pub borders: BorderPatternTable,
    pub interiors: Vec<Vec<u16>>,
}

/// Runs both initialization stages.
pub fn initialize(
    setup: &Setup,
    cfg: &OptimizerConfig,
    report: &mut BuildReport,
) -> Result<Initial> {
    cfg.validate()?;
    if setup.layouts.s != cfg.s {
        return Err(Error::InvalidArgument(format!(
            "setup is for S = {}, config asks for {}",
            setup.layouts.s, cfg.s
        )));
    }
    let t = Instant::now();
    let borders = init_borders(
        setup,
        cfg.d0,
        cfg.seed,
        cfg.border_sweeps,
        cfg.lloyd_iterations,
    )?;
    report.borders_time = t.elapsed();
    report.border_sweeps = borders.sweeps;
    report.borders_converged = borders.converged;
    let t = Instant::now();
    let interiors = init_interiors(setup, &borders, cfg.d0, cfg.seed, cfg.lloyd_iterations)?;
    let mut dots = setup.dot_state(&borders, &interiors);
    report.spacing_repairs = repair_spacing(
        setup,
        &mut dots,
        min_spacing_d2(cfg.d0),
        REPAIR_REACH,
        REPAIR_PASSES,
    );
    let (patterns, interiors) = setup.split_state(&dots);
    report.interiors_time = t.elapsed();
    Ok(Initial {
        borders: BorderPatternTable {
            patterns,
            ..borders
        },
        interiors,
    })
}

/// Full offline build: initialization, descent to zero, ascent to a full
/// tile. Deterministic in `(cfg, rule)`.
pub fn build_rank_table(setup: &Setup, cfg: &OptimizerConfig) -> Result<(RankTable, BuildReport)> {
    let mut report = BuildReport {
        classes: setup.catalog.registry.complete_ids().count(),
        segments: setup.layouts.segments.len(),
        k0: cfg.d0.count_of(setup.layouts.tile_pixels()),
        ..BuildReport::default()
    };
    let init = initialize(setup, cfg, &mut report)?;
    let table = rank_from(setup, cfg, &init, &mut report)?;
    Ok((table, report))
}

/// Ranks every pixel starting from the level-`k0` patterns of `init`.
pub fn rank_from(
    setup: &Setup,
    cfg: &OptimizerConfig,
    init: &Initial,
    report: &mut BuildReport,
) -> Result<RankTable> {
    let k0 = cfg.d0.count_of(setup.layouts.tile_pixels());
    let start = setup.dot_state(&init.borders, &init.interiors);
    let t = Instant::now();
    let mut ranker = Ranker::new(setup, start.clone(), cfg.sigma)?;
    ranker.descent = cfg.descent;
    ranker.run(k0, true, cfg.seed)?;
    ranker.reset(start);
    ranker.run(k0, false, cfg.seed)?;
    report.ranking_time = t.elapsed();
    report.exact_cover_levels = ranker.fallbacks;
    report.backtracks = ranker.backtracks;
    assemble(setup, cfg, &ranker.ranks)
}

/// Turns per-variable ranks into the per-class and per-segment table.
pub fn assemble(setup: &Setup, cfg: &OptimizerConfig, ranks: &[u32]) -> Result<RankTable> {
    if let Some(v) = ranks.iter().position(|&r| r == u32::MAX) {
        return Err(Error::RankingStuck {
            level: 0,
            reason: format!("pixel variable {v} never received a rank"),
        });
    }
    let layouts = &setup.layouts;
    let mut classes = BTreeMap::new();
    for c in layouts.complete_classes() {
        let grid = layouts.grid(c.orientation);
        classes.insert(
            c.class,
            ClassRanks {
                pixels: grid.pixels.clone(),
                ranks: setup.vars.of_class[c.class as usize]
                    .iter()
                    .map(|&v| ranks[v as usize])
                    .collect(),
            },
        );
    }
    let segments = layouts
        .segments
        .iter()
        .enumerate()
        .map(|(sid, info)| {
            let base = setup.vars.segment_base[sid] as usize;
            SegmentRanks {
                key: info.label.key(),
                pixels: info.local_pixels.clone(),
                ranks: ranks[base..base + info.local_pixels.len()].to_vec(),
            }
        })
        .collect();
    let table = RankTable {
        s: cfg.s,
        d0: cfg.d0,
        seed: cfg.seed,
        sigma: cfg.sigma,
        shape: setup.rule.shape_name().to_string(),
        rule_hash: setup.rule.hash(),
        classes,
        segments,
    };
    table.validate()?;
    Ok(table)
}
