from . import des, memctl, slp, stack

BUILDERS = {
    "stack": stack.build_model,
    "memc": memctl.build_model,
    "vec": slp.build_model,
    "des": des.build_model,
}

MUTANTS = {
    "stack": sorted(stack.MUTANTS),
    "memc": sorted(memctl.MUTANTS),
    "vec": [],
    "des": sorted(des.MUTANTS),
}


def get_model(name: str, **params):
    try:
        builder = BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; choose from {', '.join(BUILDERS)}") from None
    mutant = params.get("mutant")
    if mutant and mutant not in MUTANTS[name]:
        raise ValueError(f"model {name!r} has no mutant {mutant!r}")
    return builder(**params)
