use lambda_orders::selftest::{run_criterion, Options, CRITERIA};

fn main() {
    let opts = Options::default();
    let mut failed = 0;
    for id in 1..=CRITERIA.len() {
        let result = run_criterion(id, &opts);
        println!("{}", result.line());
        if !result.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
