//! Command-line interface: instance ingestion, coalition tables,
//! allocations, rule comparison, random generation, and self-validation.
//!
//! Exit codes: 0 success, 2 parse/schema errors, 3 domain violations,
//! 4 internal invariant failures.

use crate::allocation::{
    delta_proportional, egalitarian_rate, in_core, min_excess_per_essential, min_excess_ratio,
    nea, proportional_rate, rho_egalitarian, rho_proportional, Allocation, AllocationError,
};
use crate::coalition::{brute_force_coalition, solve_coalition, Coalition};
use crate::game::{CEGame, GameError};
use crate::gen::{generate, Profile};
use crate::instance::{load_instance, to_toml, Instance, InstanceError};
use crate::model::CESituation;
use crate::nucleolus::{nucleolus, NucleolusError};
use crate::numeric::{format_decimal, parse_decimal, Rational};
use crate::report::ReportTable;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "cegame", version, about = "Exact cooperative-export game solver")]
struct Cli {
    /// Decimal places for displayed values (comparisons stay exact).
    #[arg(long, global = true, default_value_t = 4)]
    digits: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Suppress warnings and informational notes.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Nea,
    Delta,
    Egal,
    Prop,
    Nucleolus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Mixed,
    EssentialHeavy,
    ComplementaryHeavy,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Profile {
        match p {
            ProfileArg::Mixed => Profile::Mixed,
            ProfileArg::EssentialHeavy => Profile::EssentialHeavy,
            ProfileArg::ComplementaryHeavy => Profile::ComplementaryHeavy,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve every coalition (or selected ones) of an instance.
    Solve {
        instance: PathBuf,
        /// Restrict output to one coalition, e.g. `--coalition 3,4`;
        /// repeatable.
        #[arg(long = "coalition")]
        coalitions: Vec<String>,
    },
    /// Compute one allocation rule and its core verdict.
    Allocate {
        instance: PathBuf,
        #[arg(long, value_enum)]
        rule: RuleArg,
        /// Tax rate for the rate rules: a number or `auto` for the
        /// maximal stable rate.
        #[arg(long, default_value = "auto")]
        rho: String,
    },
    /// Compare all allocation rules side by side.
    Compare { instance: PathBuf },
    /// Generate a pseudo-random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ProfileArg::Mixed)]
        profile: ProfileArg,
        /// Write to a file instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check structural invariants of an instance end to end.
    Validate { instance: PathBuf },
}

#[derive(Debug)]
enum CliError {
    Schema(String),
    Domain(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Schema(m) | CliError::Domain(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> CliError {
        CliError::Schema(e.to_string())
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> CliError {
        CliError::Domain(e.to_string())
    }
}

impl From<AllocationError> for CliError {
    fn from(e: AllocationError) -> CliError {
        CliError::Domain(e.to_string())
    }
}

impl From<NucleolusError> for CliError {
    fn from(e: NucleolusError) -> CliError {
        CliError::Internal(e.to_string())
    }
}

/// Parses argv, runs the command, and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let ctx = Ctx { digits: cli.digits, format: cli.format, quiet: cli.quiet };
    let result = match cli.command {
        Command::Solve { instance, coalitions } => cmd_solve(&ctx, &instance, &coalitions),
        Command::Allocate { instance, rule, rho } => cmd_allocate(&ctx, &instance, rule, &rho),
        Command::Compare { instance } => cmd_compare(&ctx, &instance),
        Command::Gen { n, seed, profile, output } => cmd_gen(&ctx, n, seed, profile.into(), output),
        Command::Validate { instance } => cmd_validate(&ctx, &instance),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

struct Ctx {
    digits: usize,
    format: Format,
    quiet: bool,
}

impl Ctx {
    fn fmt(&self, value: &Rational) -> String {
        format_decimal(value, self.digits)
    }

    fn warn(&self, message: &str) {
        if !self.quiet {
            eprintln!("warning: {message}");
        }
    }

    fn print_table(&self, table: &ReportTable) {
        match self.format {
            Format::Table => print!("{}", table.to_text()),
            Format::Csv => print!("{}", table.to_csv()),
        }
    }
}

fn load(ctx: &Ctx, path: &PathBuf) -> Result<Instance, CliError> {
    let instance = load_instance(path)?;
    for w in instance.situation.warnings() {
        ctx.warn(&w);
    }
    Ok(instance)
}

fn parse_coalition_flag(situation: &CESituation, flag: &str) -> Result<Coalition, CliError> {
    let mut coalition = Coalition::EMPTY;
    for id in flag.split(',') {
        let id = id.trim();
        let idx = situation.player_index(id).ok_or_else(|| {
            CliError::Domain(format!("unknown player id `{id}` in --coalition"))
        })?;
        coalition = coalition.insert(idx);
    }
    Ok(coalition)
}

fn solution_row(
    ctx: &Ctx,
    situation: &CESituation,
    sol: &crate::coalition::CoalitionSolution,
) -> Vec<String> {
    vec![
        sol.members.label_with(situation),
        sol.exporters.label_with(situation),
        sol.members.difference(sol.exporters).label_with(situation),
        ctx.fmt(&sol.commitment),
        ctx.fmt(&sol.value),
    ]
}

fn cmd_solve(ctx: &Ctx, path: &PathBuf, coalition_flags: &[String]) -> Result<(), CliError> {
    let instance = load(ctx, path)?;
    let situation = instance.situation;
    let mut table = ReportTable::new(
        ["S", "R", "domestic", "m", "v"].iter().map(|s| s.to_string()).collect(),
    );
    if coalition_flags.is_empty() {
        let game = CEGame::build(situation.clone())?;
        for bits in 1..=game.grand().bits() {
            let sol = game.solution(Coalition::from_bits(bits));
            table.push_row(solution_row(ctx, &situation, sol));
        }
    } else {
        for flag in coalition_flags {
            let s = parse_coalition_flag(&situation, flag)?;
            let sol = solve_coalition(&situation, s)
                .map_err(|e| CliError::Domain(e.to_string()))?;
            table.push_row(solution_row(ctx, &situation, &sol));
        }
    }
    ctx.print_table(&table);
    Ok(())
}

fn allocation_table(ctx: &Ctx, situation: &CESituation, alloc: &Allocation) -> ReportTable {
    let mut table = ReportTable::new(
        ["player", "rule", "payoff"].iter().map(|s| s.to_string()).collect(),
    );
    for (i, payoff) in alloc.payoffs.iter().enumerate() {
        table.push_row(vec![
            situation.players()[i].clone(),
            alloc.rule.name().to_string(),
            ctx.fmt(payoff),
        ]);
    }
    table
}

fn core_verdict(ctx: &Ctx, game: &CEGame, payoffs: &[Rational]) -> String {
    let check = in_core(game, payoffs);
    if check.in_core {
        "in core: yes".to_string()
    } else if !check.efficient {
        "in core: no (not efficient)".to_string()
    } else {
        let worst = check.worst_coalition.expect("inefficiency handled above");
        format!(
            "in core: no (worst coalition {}, excess {})",
            worst.label_with(game.situation()),
            ctx.fmt(&check.worst_excess.expect("worst coalition implies excess")),
        )
    }
}

fn resolve_rate(
    ctx: &Ctx,
    game: &CEGame,
    rule: RuleArg,
    rho_flag: &str,
) -> Result<Rational, CliError> {
    if rho_flag == "auto" {
        let rho = match rule {
            RuleArg::Egal => rho_egalitarian(game)?,
            RuleArg::Prop => rho_proportional(game)?,
            _ => unreachable!("rate resolution is only for rate rules"),
        };
        return Ok(rho);
    }
    let rho = parse_decimal(rho_flag)
        .map_err(|e| CliError::Domain(format!("invalid --rho: {e}")))?;
    // warn when the user-chosen rate exceeds the stability bound
    let phi = nea(game);
    let bound = match rule {
        RuleArg::Egal => min_excess_per_essential(game, &phi.payoffs).map(|r| r.criterion),
        RuleArg::Prop => min_excess_ratio(game, &phi.payoffs).map(|r| r.criterion),
        _ => unreachable!(),
    };
    match bound {
        Ok(bound) if rho > bound => ctx.warn(&format!(
            "rho {} exceeds the stability bound {}; the allocation may leave the core",
            ctx.fmt(&rho),
            ctx.fmt(&bound),
        )),
        Ok(_) => {}
        Err(e) => ctx.warn(&format!("no stability bound available: {e}")),
    }
    Ok(rho)
}

fn cmd_allocate(ctx: &Ctx, path: &PathBuf, rule: RuleArg, rho_flag: &str) -> Result<(), CliError> {
    let instance = load(ctx, path)?;
    let game = CEGame::build(instance.situation.clone())?;
    if !matches!(rule, RuleArg::Egal | RuleArg::Prop) && rho_flag != "auto" {
        ctx.warn("--rho only applies to the egal and prop rules; ignored");
    }
    let weights = instance.weights.as_deref();
    let alloc = match rule {
        RuleArg::Nea => nea(&game),
        RuleArg::Delta => delta_proportional(&game),
        RuleArg::Egal => {
            let rho = resolve_rate(ctx, &game, rule, rho_flag)?;
            egalitarian_rate(&game, &rho, weights)?
        }
        RuleArg::Prop => {
            let rho = resolve_rate(ctx, &game, rule, rho_flag)?;
            proportional_rate(&game, &rho, weights)?
        }
        RuleArg::Nucleolus => nucleolus(&game)?,
    };
    if !alloc.negative_components().is_empty() {
        ctx.warn("allocation has negative components");
    }
    let table = allocation_table(ctx, game.situation(), &alloc);
    ctx.print_table(&table);
    println!(
        "total = {} (v(N) = {}, exact match: {})",
        ctx.fmt(&alloc.total()),
        ctx.fmt(game.grand_value()),
        if &alloc.total() == game.grand_value() { "yes" } else { "NO" },
    );
    println!("{}", core_verdict(ctx, &game, &alloc.payoffs));
    Ok(())
}

fn cmd_compare(ctx: &Ctx, path: &PathBuf) -> Result<(), CliError> {
    let instance = load(ctx, path)?;
    let game = CEGame::build(instance.situation.clone())?;
    let weights = instance.weights.as_deref();

    let phi = nea(&game);
    let omega = delta_proportional(&game);
    let eta = nucleolus(&game)?;

    let rates = if game.complementary_exporters().is_empty() {
        None
    } else {
        let rho_e = rho_egalitarian(&game)?;
        let rho_p = rho_proportional(&game)?;
        let psi = egalitarian_rate(&game, &rho_e, weights)?;
        let prop = proportional_rate(&game, &rho_p, weights)?;
        Some((rho_e, psi, rho_p, prop))
    };

    let mut columns = vec!["player".to_string(), "nea".to_string(), "delta".to_string()];
    if rates.is_some() {
        columns.push("egal".to_string());
        columns.push("prop".to_string());
    }
    columns.push("nucleolus".to_string());
    let mut table = ReportTable::new(columns);
    for i in 0..game.n() {
        let mut row = vec![
            game.situation().players()[i].clone(),
            ctx.fmt(&phi.payoffs[i]),
            ctx.fmt(&omega.payoffs[i]),
        ];
        if let Some((_, psi, _, prop)) = &rates {
            row.push(ctx.fmt(&psi.payoffs[i]));
            row.push(ctx.fmt(&prop.payoffs[i]));
        }
        row.push(ctx.fmt(&eta.payoffs[i]));
        table.push_row(row);
    }
    ctx.print_table(&table);

    match &rates {
        Some((rho_e, psi, rho_p, prop)) => {
            println!("rho_e = {}", ctx.fmt(rho_e));
            println!("rho_p = {}", ctx.fmt(rho_p));
            println!("nea: {}", core_verdict(ctx, &game, &phi.payoffs));
            println!("delta: {}", core_verdict(ctx, &game, &omega.payoffs));
            println!("egal: {}", core_verdict(ctx, &game, &psi.payoffs));
            println!("prop: {}", core_verdict(ctx, &game, &prop.payoffs));
        }
        None => {
            println!(
                "note: no complementary player exports in the grand coalition; rate rules omitted"
            );
            println!("nea: {}", core_verdict(ctx, &game, &phi.payoffs));
            println!("delta: {}", core_verdict(ctx, &game, &omega.payoffs));
        }
    }
    println!("nucleolus: {}", core_verdict(ctx, &game, &eta.payoffs));
    Ok(())
}

fn cmd_gen(
    _ctx: &Ctx,
    n: usize,
    seed: u64,
    profile: Profile,
    output: Option<PathBuf>,
) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Domain("--n must be at least 1".to_string()));
    }
    let situation = generate(n, seed, profile);
    let text = to_toml(&Instance { situation, weights: None });
    match output {
        Some(path) => std::fs::write(&path, text).map_err(|e| {
            CliError::Schema(format!("cannot write `{}`: {e}", path.display()))
        })?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_validate(ctx: &Ctx, path: &PathBuf) -> Result<(), CliError> {
    let instance = load(ctx, path)?;
    let game = CEGame::build(instance.situation.clone())?;
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool| {
        println!("{} {}", if ok { "ok  " } else { "FAIL" }, name);
        if !ok {
            failures += 1;
        }
    };

    check("superadditive", game.check_superadditive().is_none());
    check("monotone", game.check_monotone().is_none());

    // coalitions without essential players earn nothing
    let essential = game.essential();
    let non_essential = game.grand().difference(essential);
    let mut zero_ok = true;
    for t in non_essential.subsets() {
        if !num_traits::Zero::is_zero(game.value(t)) {
            zero_ok = false;
            break;
        }
    }
    check("no essential players => zero value", zero_ok);

    // dropping never-exporting players leaves values unchanged
    let mut drop_ok = true;
    'outer: for bits in 0..=game.grand().bits() {
        let s = Coalition::from_bits(bits);
        let idle = s.difference(crate::coalition::potential_members(game.situation(), s));
        for t in idle.subsets() {
            if game.value(s.difference(t)) != game.value(s) {
                drop_ok = false;
                break 'outer;
            }
        }
    }
    check("dropping non-potential members preserves value", drop_ok);

    let phi = nea(&game);
    check("NEA allocation in core", in_core(&game, &phi.payoffs).in_core);

    if game.n() <= 8 {
        let mut oracle_ok = true;
        for bits in 0..=game.grand().bits() {
            let s = Coalition::from_bits(bits);
            let fast = game.solution(s);
            let slow = brute_force_coalition(game.situation(), s)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            if *fast != slow {
                oracle_ok = false;
                break;
            }
        }
        check("solver matches enumeration oracle", oracle_ok);
    } else if !ctx.quiet {
        println!("note: oracle cross-check skipped (n > 8)");
    }

    if failures > 0 {
        return Err(CliError::Internal(format!("{failures} check(s) failed")));
    }
    Ok(())
}

// Exercised through the binary in the integration suite; unit tests here
