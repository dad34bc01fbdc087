"""Print the fixed-state values: tau of the example and its (1 5) image, and R with its parts."""
from oddtangle import all_tau_i, big_r, tau
from oddtangle.state import apply_qubit_permutation, permutation_from_cycles, to_ket
from oddtangle.verify import example_states, product_example


def main() -> None:
    psi, _ = example_states()
    swapped = apply_qubit_permutation(psi, permutation_from_cycles("(1 5)", 5))
    prod = product_example()
    print(f"psi          = {to_ket(psi)}")
    print(f"tau(psi)     = {tau(psi).normalized:.12f}")
    print(f"(1 5) psi    = {to_ket(swapped)}")
    print(f"tau((1 5)psi)= {tau(swapped).normalized:.12f}")
    print(f"bell x GHZ3  : R = {big_r(prod).normalized:.12f}")
    for i, v in enumerate(all_tau_i(prod), start=1):
        print(f"  tau^({i}) = {v.normalized:.12f}")


if __name__ == "__main__":
    main()
