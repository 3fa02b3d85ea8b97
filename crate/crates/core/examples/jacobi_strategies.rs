//! The two parallel orderings: modified modulus (n steps) and the
//! Mantharam-Eberlein butterfly (n - 1 steps, powers of two only).

use ghsvd::hz::{Strategy, StrategyKind};

fn main() -> ghsvd::Result<()> {
    for kind in [StrategyKind::Mm, StrategyKind::Me] {
        let s = Strategy::new(kind, 8)?;
        println!("{kind:?}, n = 8, {} steps:", s.steps.len());
        for (k, step) in s.steps.iter().enumerate() {
            let pairs: Vec<String> = step.iter().map(|(p, q)| format!("({p},{q})")).collect();
            println!("  {k}: {}", pairs.join(" "));
        }
    }
    match Strategy::new(StrategyKind::Me, 12) {
        Err(e) => println!("n = 12: {e}"),
        Ok(_) => println!("n = 12: ME available"),
    }
    Ok(())
}
