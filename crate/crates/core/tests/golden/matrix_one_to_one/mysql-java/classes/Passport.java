import java.time.LocalDate;

/**
 * Generated from archetype PASSPORT.
 * Identifier: passportId.
 */
public class Passport {

    /** Object identifier. */
    private int passportId;
    private LocalDate issued;
}
