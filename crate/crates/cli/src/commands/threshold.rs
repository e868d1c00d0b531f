//! `refmeta threshold`: the effect-size threshold table, plus the
//! winning-split arithmetic for a given turnout.

use anyhow::Result;
use clap::Parser;

use refmeta::effect::{eligible_share, required_split_for_eligible_majority};
use refmeta::report::render_threshold_table;

#[derive(Parser)]
pub struct Args {
    /// Turnout rate in (0.5, 1]: print the split needed for a majority of
    /// the eligible electorate
    #[arg(long)]
    pub turnout: Option<f64>,

    /// Winning-side split in (0, 1]: print its share of the eligible
    /// electorate (requires --turnout)
    #[arg(long)]
    pub split: Option<f64>,
}

pub fn run(args: &Args) -> Result<i32> {
    print!("{}", render_threshold_table());

    if let Some(turnout) = args.turnout {
        let split = required_split_for_eligible_majority(turnout)?;
        println!();
        println!(
            "required split {:.1}%-{:.1}% at {:.1}% turnout for a majority of the eligible electorate",
            split * 100.0,
            (1.0 - split) * 100.0,
            turnout * 100.0
        );
        if let Some(s) = args.split {
            let share = eligible_share(s, turnout)?;
            println!(
                "eligible share: {:.1}% of a {:.1}% turnout = {:.1}% of the eligible electorate",
                s * 100.0,
                turnout * 100.0,
                share * 100.0
            );
        }
    } else if args.split.is_some() {
        anyhow::bail!("--split requires --turnout");
    }
    Ok(0)
}
