//! Show what the rule-based parser extracts from a few prompts.
//!
//! ```text
//! cargo run --example parse_intent [-- "your prompt"]
//! ```

use genanim::intent::{parse_rules, Preset};
use genanim::synthetic;

fn main() {
    let scene = synthetic::mario_hills();
    let prompts: Vec<String> = match std::env::args().nth(1) {
        Some(p) => vec![p],
        None => [
            "Move Mario along the hilly path.",
            "Make Mario bounce for 3 seconds",
            "Slide Mario in from the right over 800ms",
            "Make Mario spin forever",
            "Make the walrus dance",
        ]
        .map(String::from)
        .to_vec(),
    };
    for prompt in &prompts {
        println!("> {prompt}");
        match parse_rules(prompt, &scene) {
            Ok((intent, trace)) => {
                println!("  {}", intent.to_json());
                println!("  rules: {}", trace.matched_rules.join(", "));
                for w in &trace.warnings {
                    println!("  warning: {w}");
                }
            }
            Err(e) => println!("  error: {e}"),
        }
    }
    println!("{} presets: {}", Preset::ALL.len(), Preset::ALL.map(|p| p.name()).join(", "));
}
