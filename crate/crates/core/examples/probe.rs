use otterbench_core::classify::*;
use otterbench_core::engine::*;
use num_bigint::BigUint;

fn main() {
    // Reproduce a suspicious record by scanning some 4x2 machines quickly:
    // classify with otter on (no verify) and compare halted results to naive.
    let mut sink = otterbench_core::enumerate::VecSink::default();
    otterbench_core::enumerate::enumerate(4, 2, otterbench_core::enumerate::GenerationMode::Tnf,
        &otterbench_core::enumerate::EnumerateBudgets::default(), &mut sink).unwrap();
    let budgets = ClassifyBudgets { max_steps: 100_000, max_hops: Some(BigUint::from(10_000u64)), ..ClassifyBudgets::default() };
    let mut mismatches = 0;
    for (i, m) in sink.machines.iter().enumerate() {
        let rec = classify_machine(i as u64, m, &budgets);
        if rec.status == "halted" {
            let naive = naive_run(m, 20_000);
            if naive.status.is_halted() {
                if naive.ones.to_string() != rec.ones || naive.hops.to_string() != rec.hops {
                    mismatches += 1;
                    println!("MISMATCH {}: otter says ones={} hops={}, naive says ones={} hops={}",
                        m.format(), rec.ones, rec.hops, naive.ones, naive.hops);
                    if mismatches > 5 { return; }
                }
            } else {
                println!("FALSE HALT {}: otter says halted ones={} hops={} but naive still running at 20k",
                    m.format(), rec.ones, rec.hops);
                mismatches += 1;
                if mismatches > 5 { return; }
            }
        }
    }
    println!("done, {mismatches} mismatches");
}
