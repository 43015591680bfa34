//! Stop-word lists.
//!
//! The file format is one word per line, UTF-8; `#` starts a comment that
//! runs to the end of the line and blank lines are ignored. Words are
//! down-cased on load.

use std::collections::BTreeSet;

/// Bundled English list (function words and common auxiliaries).
pub const DEFAULT_ENGLISH: &str = "\
# Default English stop words
a
about
above
after
again
against
all
also
am
an
and
any
are
as
at
be
because
been
before
being
below
between
both
but
by
can
could
did
do
does
doing
down
during
each
few
for
from
further
had
has
have
having
he
her
here
hers
herself
him
himself
his
how
i
if
in
into
is
it
its
itself
just
may
me
more
most
must
my
myself
no
nor
not
now
of
off
on
once
only
or
other
our
ours
ourselves
out
over
own
same
shall
she
should
so
some
such
than
that
the
their
theirs
them
themselves
then
there
these
they
this
those
through
to
too
under
until
up
upon
us
very
was
we
were
what
when
where
which
while
who
whom
why
will
with
would
you
your
yours
yourself
yourselves
";

/// Parse a stop-word file.
pub fn parse(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn default_english() -> BTreeSet<String> {
    parse(DEFAULT_ENGLISH)
}
