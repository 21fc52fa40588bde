from contperc.cli import main

raise SystemExit(main())
